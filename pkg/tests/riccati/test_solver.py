import numpy as np
import pytest
import scipy.linalg

from src.hamiltonian.structure import build_hamiltonian
from src.linalg.decompositions import stable_invariant_basis
from src.problem.model import RiccatiProblem
from src.riccati.solver import SolutionMode, solve_are, verify_inequality
from src.utils.exceptions import AxisEigenvalueError, NotHermitianError, SingularX1Error

# Constants
SQRT2 = np.sqrt(2.0)
A_WORKED = [[1, -1, 1], [0, 1, 1], [0, 0, 1]]
B_WORKED = [[1, 0], [1, 0], [0, 1]]
G_WORKED = [[6, -2, -2], [-2, -3, -2], [-2, -2, -3.9]]
GAMMA_WORKED = [[-10, 0], [0, 0.1]]
ZETA = [[4, 2, 2], [2, 4, 2], [2, 2, 4]]
H_WORKED = [
    [128.485, -178.389, -7.18338],
    [-178.389, 259.987, 12.4241],
    [-7.18338, 12.4241, 1.25879],
]


class TestSolveAre:
    """Tests for Riccati equations solved through invariant subspaces."""

    @pytest.fixture()
    def scalar_problem(self):
        """A=-1, B=1, G=-1, Gamma=-1: h^2 - 2h - 1 = 0 after sign flips."""
        return RiccatiProblem([[-1.0]], [[1.0]], [[-1.0]], [[-1.0]])

    def test_solve_are_with_scalar_problem_returns_stabilizing_root(self, scalar_problem):
        """Stabilizing root is 1 - sqrt(2) with closed loop -sqrt(2)."""
        # Act
        certificate = solve_are(scalar_problem, SolutionMode.STABILIZING)

        # Assert
        assert certificate.H[0, 0].real == pytest.approx(1 - SQRT2)
        assert certificate.closed_loop_eigenvalues[0].real == pytest.approx(-SQRT2)
        assert certificate.residual_norm <= 1e-10

    def test_solve_are_with_anti_stabilizing_mode_returns_other_root(self, scalar_problem):
        """Anti-stabilizing root is 1 + sqrt(2) with closed loop +sqrt(2)."""
        # Act
        certificate = solve_are(scalar_problem, "anti_stabilizing")

        # Assert
        assert certificate.mode is SolutionMode.ANTI_STABILIZING
        assert certificate.H[0, 0].real == pytest.approx(1 + SQRT2)
        assert certificate.closed_loop_eigenvalues[0].real == pytest.approx(SQRT2)

    def test_solve_are_with_no_inputs_matches_lyapunov_solution(self):
        """With m = 0 the equation is HA + A^*H + G = 0."""
        # Arrange
        a = np.array([[-1.0, 2.0], [0.0, -3.0]])
        g = np.array([[2.0, 1.0], [1.0, 4.0]])
        p = RiccatiProblem(a, np.zeros((2, 0)), g, np.zeros((0, 0)))
        expected = scipy.linalg.solve_continuous_lyapunov(a.T, -g)

        # Act
        certificate = solve_are(p)

        # Assert
        assert np.allclose(certificate.H, expected, atol=1e-10)
        assert np.allclose(certificate.H, certificate.H.conj().T)

    def test_solve_are_with_worked_example_reproduces_reference_solution(self):
        """G + zeta gives the known stabilizing H, which solves the strict inequality for G."""
        # Arrange
        p = RiccatiProblem(A_WORKED, B_WORKED, G_WORKED, GAMMA_WORKED)
        perturbed = p.with_g(p.G + np.array(ZETA))

        # Act
        certificate = solve_are(perturbed, tol=1e-9, original=p)

        # Assert
        assert np.allclose(certificate.H.real, H_WORKED, rtol=5e-3, atol=5e-3)
        assert certificate.inequality_satisfied
        assert certificate.inequality_margin < 0
        assert all(x.real < 0 for x in certificate.closed_loop_eigenvalues)

    def test_solve_are_with_axis_eigenvalues_raises_axis_error(self):
        """R = J has eigenvalues +-i."""
        # Arrange
        p = RiccatiProblem([[0.0]], [[1.0]], [[-1.0]], [[1.0]])

        # Act & Assert
        with pytest.raises(AxisEigenvalueError):
            solve_are(p)

    def test_solve_are_with_uncontrollable_unstable_mode_raises_singular_x1(self):
        """A = 1, B = 0: the stable subspace of R is (0, 1) and X1 = 0."""
        # Arrange
        p = RiccatiProblem([[1.0]], [[0.0]], [[1.0]], [[1.0]])

        # Act & Assert
        with pytest.raises(SingularX1Error) as excinfo:
            solve_are(p)
        assert excinfo.value.code == "singular_x1"

    def test_stable_subspace_with_random_problem_is_lagrangian(self):
        """The stable subspace basis Z satisfies Z^* J Z = 0."""
        # Arrange
        rng = np.random.default_rng(7)
        a = rng.standard_normal((3, 3)) - 4 * np.eye(3)
        b = rng.standard_normal((3, 2))
        c = rng.standard_normal((3, 3))
        p = RiccatiProblem(a, b, -(c @ c.T + np.eye(3)), np.eye(2))
        hp = build_hamiltonian(p)

        # Act
        z = stable_invariant_basis(hp.R)

        # Assert
        assert np.max(np.abs(z.conj().T @ hp.J @ z)) <= 1e-10


class TestVerifyInequality:
    """Tests for the certified margin of the strict inequality."""

    def test_verify_inequality_with_zero_h_and_negative_g_is_satisfied(self):
        """A=0, B=1, G=-1, Gamma=1 at h=0: the left side is -1."""
        # Arrange
        p = RiccatiProblem([[0.0]], [[1.0]], [[-1.0]], [[1.0]])

        # Act
        check = verify_inequality(p, [[0.0]])

        # Assert
        assert check.margin == pytest.approx(-1.0)
        assert check.satisfied

    def test_verify_inequality_with_positive_g_is_not_satisfied(self):
        """With H = 0 the margin is the largest eigenvalue of G."""
        # Arrange
        p = RiccatiProblem(np.zeros((2, 2)), np.eye(2), np.diag([1.0, 3.0]), np.eye(2))

        # Act
        check = verify_inequality(p, np.zeros((2, 2)))

        # Assert
        assert check.margin == pytest.approx(3.0)
        assert not check.satisfied

    def test_verify_inequality_with_margin_inside_tolerance_is_not_satisfied(self):
        """A margin within tol * scale of zero is not certified."""
        # Arrange
        p = RiccatiProblem([[0.0]], [[1.0]], [[1e6 - 1e-6]], [[1.0]])

        # Act
        check = verify_inequality(p, [[1e3]], tol=1e-9)

        # Assert
        assert check.margin < 0
        assert not check.satisfied

    def test_verify_inequality_with_non_hermitian_h_raises_error(self):
        """H must be Hermitian."""
        # Arrange
        p = RiccatiProblem(np.zeros((2, 2)), np.eye(2), -np.eye(2), np.eye(2))

        # Act & Assert
        with pytest.raises(NotHermitianError):
            verify_inequality(p, [[0.0, 1.0], [0.0, 0.0]])
