from pathlib import Path
from typing import Any

import pytest
import yaml

from src.utils.config import CONFIG_FILENAME, Config, SearchConfig, ToleranceConfig, get_config

# Constants
REPO_CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"
LINALG_TOL = 1e-10
AXIS_TOL = 1e-6
BISECTION_STEPS = 30


def _write_config(config_dir: Path, content: dict[str, Any]) -> None:
    with open(config_dir / CONFIG_FILENAME, "w") as f:
        yaml.dump(content, f)


class TestConfigModule:
    """Tests for the configuration module."""

    def test_get_config_with_valid_file_returns_config(self, tmp_path):
        """Test that get_config returns configuration from a valid file."""
        # Arrange
        valid_config: dict[str, Any] = {
            "logging": {"level": "DEBUG", "file": None, "json_format": True},
            "tolerances": {"linalg": LINALG_TOL, "axis": AXIS_TOL, "rank": 1e-5},
            "search": {"bisection_steps": BISECTION_STEPS, "seed": 7},
            "grid": {"points": 512, "omega_max": 20.0},
            "trace": {"t_max": 2.0, "steps": 50, "delta": 0.5, "max_halvings": 4},
        }
        _write_config(tmp_path, valid_config)

        # Act
        result = get_config(tmp_path)

        # Assert
        assert isinstance(result, Config)
        assert result.logging.level == "DEBUG"
        assert result.logging.json_format is True
        assert result.tolerances.linalg == LINALG_TOL
        assert result.tolerances.axis == AXIS_TOL
        assert result.search.bisection_steps == BISECTION_STEPS
        assert result.search.eps_max_factor == SearchConfig.eps_max_factor
        assert result.grid.omega_max == pytest.approx(20.0)
        assert result.trace.max_halvings == 4

    def test_get_config_with_repository_file_matches_defaults(self):
        """The shipped configuration holds the same values as the dataclass defaults."""
        # Act
        result = get_config(REPO_CONFIG_DIR)

        # Assert
        assert result == Config()

    def test_get_config_with_missing_config_file_raises_file_not_found_error(self, tmp_path):
        """Test handling a missing configuration file."""
        # Arrange
        config_dir = tmp_path / "non_existent_dir"
        config_dir.mkdir(exist_ok=True)

        # Act & Assert
        with pytest.raises(FileNotFoundError, match="Configuration file not found"):
            get_config(config_dir)

    def test_get_config_with_invalid_yaml_raises_error(self, tmp_path):
        """Test that get_config raises an error when YAML is invalid."""
        # Arrange
        (tmp_path / CONFIG_FILENAME).write_text("key: : invalid")

        # Act & Assert
        with pytest.raises(ValueError, match="Configuration error in YAML"):
            get_config(tmp_path)

    def test_get_config_with_missing_key_raises_error(self, tmp_path):
        """Test that get_config raises an error when a required key is missing."""
        # Arrange
        _write_config(tmp_path, {"tolerances": {"linalg": LINALG_TOL}})

        # Act & Assert
        with pytest.raises(KeyError, match="Missing required configuration key"):
            get_config(tmp_path)

    def test_get_config_with_minimal_required_keys_uses_defaults(self, tmp_path):
        """Only the tolerances section is required."""
        # Arrange
        _write_config(tmp_path, {"tolerances": {"linalg": LINALG_TOL, "axis": AXIS_TOL}})

        # Act
        result = get_config(tmp_path)

        # Assert
        assert result.tolerances.rank == ToleranceConfig.rank
        assert result.search == SearchConfig()
        assert result.logging.level == "WARNING"

    def test_get_config_with_non_mapping_section_raises_error(self, tmp_path):
        """Test that a scalar tolerances section is rejected."""
        # Arrange
        _write_config(tmp_path, {"tolerances": 3})

        # Act & Assert
        with pytest.raises(ValueError, match="must be a mapping"):
            get_config(tmp_path)

    def test_get_config_with_extra_sections_succeeds(self, tmp_path):
        """Test that get_config ignores unknown sections."""
        # Arrange
        _write_config(
            tmp_path,
            {"tolerances": {"linalg": LINALG_TOL, "axis": AXIS_TOL}, "extra_section": {"k": 1}},
        )

        # Act
        result = get_config(tmp_path)

        # Assert
        assert result.tolerances.linalg == LINALG_TOL
