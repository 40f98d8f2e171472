"""Algebraic Riccati equations through Hamiltonian invariant subspaces.

If ``Z = [X; Psi]`` spans the stable invariant subspace of R and X is
nonsingular, ``H = Psi X^{-1}`` solves ``HA + A^*H + G - HQH = 0`` and
``A - QH = X Lambda X^{-1}`` is Hurwitz. ``Z^* J Z = 0`` forces H to be
Hermitian. The right half-plane subspace gives the anti-stabilizing solution.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike

from src.hamiltonian.structure import build_hamiltonian
from src.linalg.decompositions import (
    DEFAULT_TOL,
    ComplexMatrix,
    HalfPlane,
    as_complex_matrix,
    check_hermitian,
    eigen_general,
    frobenius,
    hermitian_part,
    stable_invariant_basis,
)
from src.problem.model import RiccatiProblem
from src.utils.exceptions import ClosedLoopError, SingularX1Error

# Initialize logger
logger = structlog.get_logger(__name__)

RESIDUAL_FACTOR = 1000.0


class SolutionMode(StrEnum):
    STABILIZING = "stabilizing"
    ANTI_STABILIZING = "anti_stabilizing"

    @property
    def half_plane(self) -> HalfPlane:
        return HalfPlane.LEFT if self is SolutionMode.STABILIZING else HalfPlane.RIGHT


@dataclass(frozen=True)
class InequalityCheck:
    margin: float
    satisfied: bool
    closed_loop: list[complex]


@dataclass(frozen=True)
class SolutionCertificate:
    """Hermitian solution with the evidence that certifies it."""

    H: ComplexMatrix
    mode: SolutionMode
    residual_norm: float
    closed_loop_eigenvalues: list[complex]
    inequality_margin: float
    inequality_satisfied: bool
    x1_condition: float
    delta_g: ComplexMatrix | None = None
    strategy: str | None = None


def _is_real(p: RiccatiProblem) -> bool:
    return not any(np.any(m.imag) for m in (p.A, p.B, p.G, p.Gamma))


def closed_loop_matrix(p: RiccatiProblem, h: ComplexMatrix) -> ComplexMatrix:
    return p.A - p.Q @ h


def verify_inequality(
    p: RiccatiProblem, h: ArrayLike, tol: float = DEFAULT_TOL
) -> InequalityCheck:
    """Largest eigenvalue of the symmetrized left side of the inequality.

    ``satisfied`` requires ``margin < -tol * scale`` with
    ``scale = ||G|| + 2 ||H|| ||A|| + ||H||^2 ||Q||``.

    Raises:
        NotHermitianError: If H is not Hermitian within tol
    """
    hm = as_complex_matrix(h, "H")
    check_hermitian(hm, tol, "H")
    hm = hermitian_part(hm)
    left = hermitian_part(p.residual(hm))
    margin = float(scipy.linalg.eigvalsh(left)[-1])

    h_norm = frobenius(hm)
    scale = frobenius(p.G) + 2 * h_norm * frobenius(p.A) + h_norm**2 * frobenius(p.Q)
    closed_loop = [complex(x) for x in eigen_general(closed_loop_matrix(p, hm)).eigenvalues]
    return InequalityCheck(
        margin=margin,
        satisfied=margin < -tol * scale,
        closed_loop=sorted(closed_loop, key=lambda x: (x.real, x.imag)),
    )


def solve_are(
    p: RiccatiProblem,
    mode: SolutionMode | str = SolutionMode.STABILIZING,
    tol: float = DEFAULT_TOL,
    original: RiccatiProblem | None = None,
) -> SolutionCertificate:
    """Stabilizing or anti-stabilizing solution of the Riccati equation of ``p``.

    Args:
        p: Problem whose equation is solved (possibly with a perturbed G)
        mode: Which invariant subspace to use
        tol: Relative tolerance
        original: Problem the inequality margin is measured against
            (defaults to ``p``)

    Returns:
        SolutionCertificate

    Raises:
        AxisEigenvalueError: If R has eigenvalues on the imaginary axis
        SingularX1Error: If the top block of the subspace basis is singular
        ClosedLoopError: If the closed loop is not in the mode's half-plane
    """
    mode = SolutionMode(mode)
    hp = build_hamiltonian(p)
    n = p.n
    z = stable_invariant_basis(hp.R, mode.half_plane, tol)
    x1, psi1 = z[:n], z[n:]

    sigma = scipy.linalg.svdvals(x1)
    condition = float(sigma[0] / sigma[-1]) if sigma[-1] > 0 else float("inf")
    if condition > 1 / (100 * tol):
        error_msg = f"Subspace basis top block is singular (condition {condition:.3e})"
        raise SingularX1Error(error_msg, {"condition": condition, "mode": mode.value})

    h = scipy.linalg.solve(x1.T, psi1.T).T
    h = hermitian_part(h)
    if _is_real(p):
        h = h.real.astype(np.complex128)

    residual_norm = frobenius(p.residual(h))
    bound = RESIDUAL_FACTOR * tol * (frobenius(p.G) + frobenius(h) ** 2 * frobenius(p.Q))
    if residual_norm > bound:
        logger.warning("Riccati residual above bound", residual=residual_norm, bound=bound)

    closed_loop = eigen_general(closed_loop_matrix(p, h)).eigenvalues
    if mode is SolutionMode.STABILIZING:
        violating = closed_loop[closed_loop.real >= 0]
    else:
        violating = closed_loop[closed_loop.real <= 0]
    if violating.size:
        error_msg = f"Closed loop has eigenvalues outside the {mode.half_plane.value}"
        raise ClosedLoopError(
            error_msg,
            {"mode": mode.value, "eigenvalues": [[x.real, x.imag] for x in violating]},
        )

    check = verify_inequality(original or p, h, tol)
    logger.info(
        "Solved Riccati equation",
        mode=mode.value,
        residual=residual_norm,
        margin=check.margin,
    )
    return SolutionCertificate(
        H=h,
        mode=mode,
        residual_norm=residual_norm,
        closed_loop_eigenvalues=sorted(
            (complex(x) for x in closed_loop), key=lambda x: (x.real, x.imag)
        ),
        inequality_margin=check.margin,
        inequality_satisfied=check.satisfied,
        x1_condition=condition,
    )
