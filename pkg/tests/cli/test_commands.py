import io
import json
from pathlib import Path

import pytest

from src.cli.commands import (
    EXIT_ERROR,
    EXIT_NOT_SOLVABLE,
    EXIT_OK,
    Command,
    RunConfig,
    run,
)

# Constants
PROBLEMS_DIR = Path(__file__).resolve().parents[2] / "data" / "problems"
WORKED = PROBLEMS_DIR / "worked_example.json"
UNSOLVABLE = PROBLEMS_DIR / "unsolvable_scalar.json"
J_PROBLEM = '{"n": 1, "m": 1, "A": [[0]], "B": [[1]], "G": [[-1]], "Gamma": [[1]]}'


class TestRun:
    """Tests for command dispatch and exit statuses."""

    @pytest.fixture()
    def stream(self):
        return io.StringIO()

    @pytest.fixture()
    def j_problem_file(self, tmp_path):
        """Problem file whose Hamiltonian is J."""
        path = tmp_path / "j_problem.json"
        path.write_text(J_PROBLEM)
        return path

    def test_run_check_with_worked_example_reports_solvable(self, stream):
        """The worked example passes the solvability test."""
        # Arrange
        cfg = RunConfig(command=Command.CHECK, input_path=WORKED)

        # Act
        status = run(cfg, stream)

        # Assert
        report = json.loads(stream.getvalue())
        assert status == EXIT_OK
        assert report["solvable"] is True
        assert report["witness"] is None

    def test_run_check_with_unsolvable_problem_exits_with_two(self, stream):
        """A negative s(omega) gives status 2 and the witness frequency."""
        # Arrange
        cfg = RunConfig(command=Command.CHECK, input_path=UNSOLVABLE)

        # Act
        status = run(cfg, stream)

        # Assert
        report = json.loads(stream.getvalue())
        assert status == EXIT_NOT_SOLVABLE
        assert report["solvable"] is False
        assert report["witness"] == pytest.approx(-1.0, abs=1e-6)

    def test_run_solve_with_unsolvable_problem_writes_error_payload(self, stream):
        """solve reports not_solvable with the witness in the context."""
        # Arrange
        cfg = RunConfig(command=Command.SOLVE, input_path=UNSOLVABLE)

        # Act
        status = run(cfg, stream)

        # Assert
        payload = json.loads(stream.getvalue())
        assert status == EXIT_NOT_SOLVABLE
        assert payload["code"] == "not_solvable"
        assert payload["context"]["witness"] == pytest.approx(-1.0, abs=1e-6)

    def test_run_solve_with_unsolvable_problem_and_output_path_writes_file(
        self, stream, tmp_path
    ):
        """The not_solvable payload follows --output like any other report."""
        # Arrange
        output = tmp_path / "out.json"
        cfg = RunConfig(command=Command.SOLVE, input_path=UNSOLVABLE, output_path=output)

        # Act
        status = run(cfg, stream)

        # Assert
        payload = json.loads(output.read_text())
        assert status == EXIT_NOT_SOLVABLE
        assert stream.getvalue() == ""
        assert payload["code"] == "not_solvable"

    def test_run_solve_with_worked_example_uses_shipped_delta_g(self, stream):
        """A delta_g in the problem file replaces the automatic search."""
        # Arrange
        cfg = RunConfig(command=Command.SOLVE, input_path=WORKED)

        # Act
        status = run(cfg, stream)

        # Assert
        report = json.loads(stream.getvalue())
        assert status == EXIT_OK
        assert report["strategy"] == "user"
        assert report["inequality_satisfied"] is True
        assert report["H"][0][0] == pytest.approx(128.485, rel=5e-3)

    def test_run_with_malformed_problem_writes_parse_error(self, stream, tmp_path):
        """Malformed JSON exits with status 1 and a parse_error payload."""
        # Arrange
        path = tmp_path / "broken.json"
        path.write_text('{"n": 1, "A": [[0]')
        cfg = RunConfig(command=Command.SPECTRUM, input_path=path)

        # Act
        status = run(cfg, stream)

        # Assert
        payload = json.loads(stream.getvalue())
        assert status == EXIT_ERROR
        assert payload["code"] == "parse_error"
        assert set(payload) == {"code", "message", "context"}

    def test_run_with_invalid_steps_reports_invalid_arguments(self, stream, j_problem_file):
        """Out-of-range flags are rejected before any work is done."""
        # Arrange
        cfg = RunConfig(command=Command.TRACE, input_path=j_problem_file, steps=1)

        # Act
        status = run(cfg, stream)

        # Assert
        payload = json.loads(stream.getvalue())
        assert status == EXIT_ERROR
        assert payload["code"] == "invalid_arguments"
        assert "--steps" in payload["message"]

    def test_run_trace_with_j_problem_writes_csv(self, stream, j_problem_file):
        """trace emits one CSV row per eigenvalue and grid point."""
        # Arrange
        cfg = RunConfig(command=Command.TRACE, input_path=j_problem_file, t_max=0.5, steps=5)

        # Act
        status = run(cfg, stream)

        # Assert
        lines = stream.getvalue().strip().splitlines()
        assert status == EXIT_OK
        assert lines[0] == "t,eig_index,re,im,on_axis"
        assert len(lines) == 1 + 5 * 2

    def test_run_classify_with_j_problem_reports_one_block_per_frequency(
        self, stream, j_problem_file
    ):
        """R = J has simple eigenvalues of opposite type at -1 and +1."""
        # Arrange
        cfg = RunConfig(command=Command.CLASSIFY, input_path=j_problem_file)

        # Act
        status = run(cfg, stream)

        # Assert
        report = json.loads(stream.getvalue())
        assert status == EXIT_OK
        assert [b["omega"] for b in report["blocks"]] == pytest.approx([-1.0, 1.0])
        assert report["first_type_count"] == 1
        assert report["second_type_count"] == 1

    def test_run_with_output_path_writes_file_and_leaves_stream_empty(
        self, stream, j_problem_file, tmp_path
    ):
        """--output redirects the report."""
        # Arrange
        output = tmp_path / "spectrum.json"
        cfg = RunConfig(command=Command.SPECTRUM, input_path=j_problem_file, output_path=output)

        # Act
        status = run(cfg, stream)

        # Assert
        assert status == EXIT_OK
        assert stream.getvalue() == ""
        assert "eigenvalues" in json.loads(output.read_text())

    def test_run_ky_with_j_problem_reaches_zero_at_unit_frequency(self, stream, j_problem_file):
        """det pi(i omega) = 1 - 1/omega^2 dips to zero near +-1."""
        # Arrange
        cfg = RunConfig(
            command=Command.KY, input_path=j_problem_file, omega_max=2.0, grid_points=401
        )

        # Act
        status = run(cfg, stream)

        # Assert
        report = json.loads(stream.getvalue())
        assert status == EXIT_OK
        assert report["omega_max"] == pytest.approx(2.0)
        assert report["min_abs_det"] == pytest.approx(0.0, abs=1e-6)
        assert abs(report["argmin_omega"]) == pytest.approx(1.0)
