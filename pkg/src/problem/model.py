"""Riccati inequality problem data and its application reductions.

A problem is the quadruple ``(A, B, G, Gamma)`` of the inequality

    H A + A^* H + G - H B Gamma^{-1} B^* H < 0

with Hermitian ``G`` and invertible Hermitian ``Gamma``. Absolute-stability
and H-infinity feasibility problems are reduced to this standard form by
``from_absolute_stability`` and ``from_hinf``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike, NDArray

from src.linalg.decompositions import (
    DEFAULT_TOL,
    ComplexMatrix,
    as_complex_matrix,
    check_hermitian,
    eigen_general,
    eigen_hermitian,
    frobenius,
    hermitian_part,
    numerical_rank,
    smallest_singular_value,
)
from src.utils.exceptions import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    SingularGammaError,
)

# Initialize logger
logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class RiccatiProblem:
    """The quadruple (A, B, G, Gamma) in standard form."""

    A: ComplexMatrix
    B: ComplexMatrix
    G: ComplexMatrix
    Gamma: ComplexMatrix
    name: str = field(default="problem", compare=False)

    def __post_init__(self) -> None:
        for attr in ("A", "B", "G", "Gamma"):
            object.__setattr__(self, attr, as_complex_matrix(getattr(self, attr), attr))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def Q(self) -> ComplexMatrix:  # noqa: N802
        """Quadratic-term weight ``B Gamma^{-1} B^*`` (Hermitian)."""
        if self.m == 0:
            return np.zeros((self.n, self.n), dtype=np.complex128)
        sigma_min = smallest_singular_value(self.Gamma)
        if sigma_min <= DEFAULT_TOL * frobenius(self.Gamma):
            error_msg = f"Gamma is singular (smallest singular value {sigma_min:.3e})"
            raise SingularGammaError(error_msg, {"sigma_min": sigma_min})
        try:
            x = scipy.linalg.solve(self.Gamma, self.B.conj().T)
        except (np.linalg.LinAlgError, ValueError) as err:
            error_msg = "Gamma is singular; the quadratic term is undefined"
            raise SingularGammaError(error_msg) from err
        return hermitian_part(self.B @ x)

    def with_g(self, g: ArrayLike) -> "RiccatiProblem":
        """Copy of the problem with ``G`` replaced (e.g. ``G + Delta G``)."""
        return RiccatiProblem(self.A, self.B, np.asarray(g), self.Gamma, name=self.name)

    def residual(self, h: ArrayLike) -> ComplexMatrix:
        """Left side ``HA + A^*H + G - HQH`` of the Riccati inequality."""
        hm = as_complex_matrix(h, "H")
        return hm @ self.A + self.A.conj().T @ hm + self.G - hm @ self.Q @ hm


@dataclass(frozen=True)
class ValidationReport:
    hermitian_ok: bool
    gamma_invertible: bool
    controllable: bool
    a_axis_eigenvalues: list[float]


def _check_dimensions(p: RiccatiProblem) -> None:
    n, m = p.n, p.m
    expected = {"A": (n, n), "B": (n, m), "G": (n, n), "Gamma": (m, m)}
    for name, shape in expected.items():
        actual = getattr(p, name).shape
        if actual != shape:
            error_msg = f"{name} has shape {actual}, expected {shape}"
            raise DimensionMismatchError(
                error_msg, {"name": name, "shape": list(actual), "expected": list(shape)}
            )


def controllability_matrix(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Krylov block ``[B, AB, ..., A^{n-1}B]``."""
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def validate(p: RiccatiProblem, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the standing assumptions of a problem.

    Dimension, Hermitian-ness and invertibility of Gamma are hard errors.
    Controllability of (A, B) and eigenvalues of A on the imaginary axis are
    only reported: the Hamiltonian analysis stays well-defined without them.

    Args:
        p: Problem to validate
        tol: Relative tolerance

    Returns:
        ValidationReport with the assumption flags

    Raises:
        DimensionMismatchError: If block shapes are inconsistent
        NotHermitianError: If G or Gamma is not Hermitian
        SingularGammaError: If Gamma is numerically singular
    """
    _check_dimensions(p)
    check_hermitian(p.G, tol, "G")
    check_hermitian(p.Gamma, tol, "Gamma")

    gamma_norm = frobenius(p.Gamma)
    sigma_min = smallest_singular_value(p.Gamma) if p.m else 1.0
    if p.m and sigma_min <= tol * gamma_norm:
        error_msg = f"Gamma is singular (smallest singular value {sigma_min:.3e})"
        raise SingularGammaError(error_msg, {"sigma_min": sigma_min})

    if p.m == 0:
        controllable = p.n == 0
    else:
        krylov = controllability_matrix(p.A, p.B)
        controllable = numerical_rank(krylov, tol) == p.n
    if not controllable:
        logger.warning("Pair (A, B) is not controllable", problem=p.name)

    band = tol * frobenius(p.A)
    a_eigenvalues = eigen_general(p.A, tol).eigenvalues if p.n else np.array([])
    axis = sorted(float(x.imag) for x in a_eigenvalues if abs(x.real) <= band)
    if axis:
        logger.warning("A has eigenvalues on the imaginary axis", frequencies=axis)

    return ValidationReport(
        hermitian_ok=True,
        gamma_invertible=True,
        controllable=controllable,
        a_axis_eigenvalues=axis,
    )


def _require_positive_definite(m: ComplexMatrix, name: str, tol: float) -> None:
    eigenvalues, _ = eigen_hermitian(m, tol)
    if eigenvalues.size and eigenvalues[0] <= tol * frobenius(m):
        error_msg = f"{name} must be positive definite (smallest eigenvalue {eigenvalues[0]:.3e})"
        raise NotPositiveDefiniteError(error_msg, {"name": name, "min_eigenvalue": eigenvalues[0]})


def from_absolute_stability(
    a: ArrayLike,
    b: ArrayLike,
    g: ArrayLike,
    gamma_pos: ArrayLike,
    tol: float = DEFAULT_TOL,
) -> RiccatiProblem:
    """Standard form of ``HA + A^*H + G + H B Gamma_pos^{-1} B^* H < 0``.

    The sign of the quadratic term flips, so ``Gamma_std = -Gamma_pos``.
    """
    gamma = as_complex_matrix(gamma_pos, "Gamma_pos")
    _require_positive_definite(gamma, "Gamma_pos", tol)
    return RiccatiProblem(a, b, g, -gamma, name="absolute_stability")


def _input_block(b: ArrayLike, name: str, n: int) -> ComplexMatrix:
    block = as_complex_matrix(b, name)
    if block.shape[0] != n:
        error_msg = f"{name} has {block.shape[0]} rows, A is {n} x {n}"
        raise DimensionMismatchError(
            error_msg, {"name": name, "shape": list(block.shape), "rows": n}
        )
    return block


def from_hinf(
    a: ArrayLike,
    b_w: ArrayLike,
    b_u: ArrayLike,
    g: ArrayLike,
    gamma_w: ArrayLike,
    gamma_u: ArrayLike,
    tol: float = DEFAULT_TOL,
) -> RiccatiProblem:
    """Standard form of ``HA + A^*H + G + H B_w Gw^{-1} B_w^* H - H B_u Gu^{-1} B_u^* H < 0``.

    ``B = [B_w | B_u]`` and ``Gamma = blockdiag(-Gamma_w, Gamma_u)``. An empty
    ``B_u`` reduces to the absolute-stability form.
    """
    a_m = as_complex_matrix(a, "A")
    n = a_m.shape[0]
    bw = _input_block(b_w, "B_w", n)
    bu = _input_block(b_u, "B_u", n) if np.size(b_u) else np.zeros((n, 0), dtype=np.complex128)

    gw = as_complex_matrix(gamma_w, "Gamma_w")
    if gw.shape != (bw.shape[1], bw.shape[1]):
        error_msg = f"Gamma_w has shape {gw.shape}, B_w has {bw.shape[1]} columns"
        raise DimensionMismatchError(error_msg, {"name": "Gamma_w", "shape": list(gw.shape)})

    if bu.shape[1] == 0:
        return from_absolute_stability(a_m, bw, g, gw, tol)

    gu = as_complex_matrix(gamma_u, "Gamma_u")
    if gu.shape != (bu.shape[1], bu.shape[1]):
        error_msg = f"Gamma_u has shape {gu.shape}, B_u has {bu.shape[1]} columns"
        raise DimensionMismatchError(error_msg, {"name": "Gamma_u", "shape": list(gu.shape)})

    _require_positive_definite(gw, "Gamma_w", tol)
    _require_positive_definite(gu, "Gamma_u", tol)
    return RiccatiProblem(
        a_m,
        np.hstack([bw, bu]),
        g,
        scipy.linalg.block_diag(-gw, gu),
        name="hinf",
    )


def min_eigenvalue(m: ComplexMatrix, tol: float = DEFAULT_TOL) -> float:
    eigenvalues: NDArray[np.float64] = eigen_hermitian(m, tol)[0]
    return float(eigenvalues[0])
