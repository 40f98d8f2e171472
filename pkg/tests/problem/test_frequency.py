import numpy as np
import pytest

from src.problem.frequency import freq_pi, ky_grid_check
from src.problem.model import RiccatiProblem
from src.utils.exceptions import ResonantFrequencyError

# Constants
WORKED = RiccatiProblem(
    [[1, -1, 1], [0, 1, 1], [0, 0, 1]],
    [[1, 0], [1, 0], [0, 1]],
    [[6, -2, -2], [-2, -3, -2], [-2, -2, -3.9]],
    [[-10, 0], [0, 0.1]],
)
WORKED_AXIS_FREQUENCIES = (1.5866, 6.0506)
UNSOLVABLE = RiccatiProblem([[0.0]], [[1.0]], [[1.0]], [[-1.0]])


class TestFreqPi:
    """Tests for pi(i omega)."""

    def test_freq_pi_with_scalar_problem_matches_closed_form(self):
        """For A=0, B=1, G=1, Gamma=-1: pi(i omega) = -1 + 1/omega^2."""
        # Act
        value = freq_pi(UNSOLVABLE, 2.0)

        # Assert
        assert value[0, 0] == pytest.approx(-0.75)

    def test_freq_pi_with_worked_example_is_hermitian(self):
        """Test that pi(i omega) is Hermitian."""
        # Act
        value = freq_pi(WORKED, 0.7)

        # Assert
        assert np.allclose(value, value.conj().T)

    def test_freq_pi_at_eigenvalue_of_a_raises_resonant_frequency(self):
        """Test that an eigenvalue i omega of A is refused."""
        # Act & Assert
        with pytest.raises(ResonantFrequencyError):
            freq_pi(UNSOLVABLE, 0.0)


class TestKyGridCheck:
    """Tests for the Kalman-Yakubovich grid diagnostic."""

    def test_ky_grid_check_with_scalar_problem_finds_zero_and_skips_resonance(self):
        """Grid -2..2 in five nodes: zero of det at omega = +-1, resonance at 0."""
        # Act
        report = ky_grid_check(UNSOLVABLE, omega_max=2.0, grid_points=5)

        # Assert
        assert report.skipped == [0.0]
        assert report.min_abs_det == pytest.approx(0.0, abs=1e-12)
        assert report.argmin_omega == pytest.approx(-1.0)
        assert report.local_minima == [-1.0]
        assert not report.negative_definite
        assert not report.positive_definite

    def test_ky_grid_check_with_worked_example_localizes_axis_frequencies(self):
        """Grid minima of |det pi| sit within one cell of the axis eigenfrequencies of R."""
        # Act
        report = ky_grid_check(WORKED)

        # Assert
        cell = 2 * report.omega_max / (report.grid_points - 1)
        for omega in WORKED_AXIS_FREQUENCIES:
            for sign in (-1, 1):
                distances = [abs(m - sign * omega) for m in report.local_minima]
                assert min(distances) <= cell

    def test_ky_grid_check_with_definite_problem_reports_negative_definite(self):
        """Gamma < 0 and G <= 0 give pi(i omega) < 0 everywhere."""
        # Arrange
        p = RiccatiProblem([[-1.0]], [[1.0]], [[-1.0]], [[-1.0]])

        # Act
        report = ky_grid_check(p, omega_max=5.0, grid_points=64)

        # Assert
        assert report.negative_definite
        assert not report.positive_definite

    def test_ky_grid_check_with_one_point_raises_value_error(self):
        """Test the grid size check."""
        # Act & Assert
        with pytest.raises(ValueError, match="grid_points"):
            ky_grid_check(WORKED, grid_points=1)
