"""Dense complex linear-algebra kernels.

Schur and Hermitian eigendecompositions, ordered invariant subspaces and
inertia. The heavy lifting is LAPACK through ``scipy.linalg`` (Hessenberg
reduction plus shifted QR for ``schur``, ``trsen`` reordering for sorted
Schur forms); this module adds the tolerance conventions and the domain
errors every caller relies on.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike, NDArray

from src.utils.exceptions import (
    AxisEigenvalueError,
    DimensionMismatchError,
    NonConvergenceError,
    NotHermitianError,
)

# Initialize logger
logger = structlog.get_logger(__name__)

ComplexMatrix = NDArray[np.complex128]

DEFAULT_TOL = 1e-9


class HalfPlane(StrEnum):
    LEFT = "left-half-plane"
    RIGHT = "right-half-plane"


@dataclass(frozen=True)
class SchurForm:
    """Complex Schur factorization ``m = unitary @ triangular @ unitary^*``."""

    unitary: ComplexMatrix
    triangular: ComplexMatrix
    eigenvalues: NDArray[np.complex128]


@dataclass(frozen=True)
class Inertia:
    positive: int
    zero: int
    negative: int

    @property
    def dimension(self) -> int:
        return self.positive + self.zero + self.negative


def as_complex_matrix(data: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Coerce ``data`` to a finite two-dimensional complex128 array."""
    m = np.array(data, dtype=np.complex128)
    if m.ndim != 2:
        error_msg = f"{name} must be two-dimensional, got shape {m.shape}"
        raise DimensionMismatchError(error_msg, {"name": name, "shape": list(m.shape)})
    if not np.all(np.isfinite(m)):
        error_msg = f"{name} contains NaN or infinite entries"
        raise ValueError(error_msg)
    return m


def frobenius(m: ArrayLike) -> float:
    return float(np.linalg.norm(m))


def hermitian_part(m: ComplexMatrix) -> ComplexMatrix:
    return (m + m.conj().T) / 2


def _require_square(m: ComplexMatrix, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        error_msg = f"{name} must be square, got shape {m.shape}"
        raise DimensionMismatchError(error_msg, {"name": name, "shape": list(m.shape)})


def check_hermitian(m: ComplexMatrix, tol: float = DEFAULT_TOL, name: str = "matrix") -> None:
    """Raise ``NotHermitianError`` unless ``||m - m^*|| <= tol * ||m||``."""
    _require_square(m, name)
    skew = frobenius(m - m.conj().T)
    if skew > tol * frobenius(m):
        error_msg = f"{name} is not Hermitian (skew part {skew:.3e})"
        raise NotHermitianError(error_msg, {"name": name, "skew_norm": skew})


def eigen_general(m: ArrayLike, tol: float = DEFAULT_TOL) -> SchurForm:
    """Complex Schur form of a square matrix.

    Args:
        m: Square matrix
        tol: Relative tolerance used for the reconstruction check

    Returns:
        SchurForm whose eigenvalues are the diagonal of the triangular factor

    Raises:
        NonConvergenceError: If the QR iteration fails to converge
    """
    a = as_complex_matrix(m)
    _require_square(a)
    try:
        triangular, unitary = scipy.linalg.schur(a, output="complex")
    except (np.linalg.LinAlgError, ValueError) as err:
        error_msg = f"Schur reduction did not converge: {err}"
        raise NonConvergenceError(error_msg, {"dimension": a.shape[0]}) from err

    gap = frobenius(unitary @ triangular @ unitary.conj().T - a)
    if gap > 100 * tol * max(frobenius(a), 1.0):
        logger.warning("Schur reconstruction outside tolerance", gap=gap, tol=tol)

    return SchurForm(
        unitary=unitary,
        triangular=triangular,
        eigenvalues=np.diag(triangular).copy(),
    )


def eigen_hermitian(
    m: ArrayLike, tol: float = DEFAULT_TOL
) -> tuple[NDArray[np.float64], ComplexMatrix]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    a = as_complex_matrix(m)
    check_hermitian(a, tol)
    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitian_part(a))
    return eigenvalues, eigenvectors.astype(np.complex128)


def ordered_invariant_basis(
    m: ArrayLike, select: Callable[[complex], bool]
) -> ComplexMatrix:
    """Orthonormal basis of the invariant subspace for the selected eigenvalues.

    Uses a reordered Schur form, so clustered spectra do not require inverting
    an eigenvector matrix.
    """
    a = as_complex_matrix(m)
    _require_square(a)
    try:
        _, unitary, sdim = scipy.linalg.schur(a, output="complex", sort=select)
    except (np.linalg.LinAlgError, ValueError) as err:
        error_msg = f"Schur reordering failed: {err}"
        raise NonConvergenceError(error_msg, {"dimension": a.shape[0]}) from err
    return unitary[:, :sdim]


def stable_invariant_basis(
    m: ArrayLike, half: HalfPlane | str = HalfPlane.LEFT, tol: float = DEFAULT_TOL
) -> ComplexMatrix:
    """Orthonormal basis of the left or right half-plane invariant subspace.

    Raises:
        AxisEigenvalueError: If an eigenvalue lies within ``tol * ||m||`` of the
            imaginary axis
    """
    a = as_complex_matrix(m)
    half = HalfPlane(half)
    band = tol * frobenius(a)
    eigenvalues = eigen_general(a, tol).eigenvalues
    on_axis = np.abs(eigenvalues.real) <= band
    if np.any(on_axis):
        frequencies = sorted(float(x) for x in eigenvalues[on_axis].imag)
        error_msg = "Matrix has eigenvalues on the imaginary axis"
        raise AxisEigenvalueError(error_msg, {"frequencies": frequencies, "band": band})

    if half is HalfPlane.LEFT:
        return ordered_invariant_basis(a, lambda x: x.real < 0)
    return ordered_invariant_basis(a, lambda x: x.real > 0)


def inertia_of(m: ArrayLike, tol: float = DEFAULT_TOL) -> Inertia:
    """Counts of positive, zero and negative eigenvalues of a Hermitian matrix."""
    a = as_complex_matrix(m)
    eigenvalues, _ = eigen_hermitian(a, tol)
    band = tol * frobenius(a)
    return Inertia(
        positive=int(np.sum(eigenvalues > band)),
        zero=int(np.sum(np.abs(eigenvalues) <= band)),
        negative=int(np.sum(eigenvalues < -band)),
    )


def numerical_rank(m: ArrayLike, tol: float = DEFAULT_TOL) -> int:
    """Rank from a column-pivoted QR: diagonal entries above ``tol * |r_11|``."""
    a = as_complex_matrix(m)
    if a.size == 0:
        return 0
    _, r, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal.size == 0 or diagonal[0] == 0.0:
        return 0
    return int(np.sum(diagonal > tol * diagonal[0]))


def smallest_singular_value(m: ArrayLike) -> float:
    a = as_complex_matrix(m)
    if a.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(a)[-1])


def solve(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Solve ``a x = b`` for square nonsingular ``a``."""
    return scipy.linalg.solve(as_complex_matrix(a), np.asarray(b, dtype=np.complex128))


def describe(m: ComplexMatrix) -> dict[str, Any]:
    """Small summary used in log events."""
    return {"shape": list(m.shape), "norm": frobenius(m)}
