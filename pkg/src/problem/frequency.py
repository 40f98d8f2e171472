"""Frequency-domain function pi(i omega) and the Kalman-Yakubovich grid diagnostic."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import structlog

from src.linalg.decompositions import (
    DEFAULT_TOL,
    ComplexMatrix,
    frobenius,
    hermitian_part,
    smallest_singular_value,
)
from src.problem.model import RiccatiProblem
from src.utils.exceptions import ResonantFrequencyError

# Initialize logger
logger = structlog.get_logger(__name__)

DEFAULT_GRID_POINTS = 2048


def freq_pi(p: RiccatiProblem, omega: float, tol: float = DEFAULT_TOL) -> ComplexMatrix:
    """Evaluate ``pi(i omega) = Gamma + B^*(i omega I + A^*)^{-1} G (A - i omega I)^{-1} B``.

    With ``X = (A - i omega I)^{-1} B`` we have ``X^* = B^*(i omega I + A^*)^{-1}``,
    so the value is ``Gamma + X^* G X`` and Hermitian.

    Raises:
        ResonantFrequencyError: If ``i omega`` is an eigenvalue of A
    """
    shifted = p.A - 1j * omega * np.eye(p.n)
    sigma_min = smallest_singular_value(shifted) if p.n else 1.0
    if sigma_min <= tol * max(frobenius(p.A), 1.0):
        error_msg = f"i*{omega} is an eigenvalue of A"
        raise ResonantFrequencyError(error_msg, {"omega": omega, "sigma_min": sigma_min})

    x = scipy.linalg.solve(shifted, p.B)
    return hermitian_part(p.Gamma + x.conj().T @ p.G @ x)


@dataclass(frozen=True)
class KYReport:
    """Grid summary of ``det pi(i omega)`` over ``[-omega_max, omega_max]`` plus infinity."""

    omega_max: float
    grid_points: int
    min_abs_det: float
    argmin_omega: float
    negative_definite: bool
    positive_definite: bool
    local_minima: list[float] = field(default_factory=list)
    skipped: list[float] = field(default_factory=list)


def ky_grid_check(
    p: RiccatiProblem,
    omega_max: float | None = None,
    grid_points: int = DEFAULT_GRID_POINTS,
    tol: float = DEFAULT_TOL,
) -> KYReport:
    """Scan ``det pi(i omega)`` on a symmetric grid and at infinity.

    Diagnostic only: in the sign-indefinite case nondegeneracy of pi is not
    necessary for solvability, so the verdict never reads this report.

    Args:
        p: Problem
        omega_max: Half-width of the grid (default ``10 * ||A|| + 1``)
        grid_points: Number of finite grid nodes (at least 2)
        tol: Tolerance for resonance and definiteness

    Returns:
        KYReport with the minimum modulus, its location, definiteness flags,
        grid-local minima and resonant nodes that were skipped
    """
    if grid_points < 2:
        error_msg = f"grid_points must be at least 2, got {grid_points}"
        raise ValueError(error_msg)
    if omega_max is None:
        omega_max = 10 * frobenius(p.A) + 1
    if omega_max <= 0:
        error_msg = f"omega_max must be positive, got {omega_max}"
        raise ValueError(error_msg)

    omegas = np.linspace(-omega_max, omega_max, grid_points)
    values: list[float] = []
    kept: list[float] = []
    skipped: list[float] = []
    negative = True
    positive = True

    for omega in omegas:
        try:
            pi = freq_pi(p, float(omega), tol)
        except ResonantFrequencyError:
            logger.debug("Skipping resonant grid node", omega=float(omega))
            skipped.append(float(omega))
            continue
        eigenvalues = np.linalg.eigvalsh(pi)
        band = tol * max(frobenius(pi), 1.0)
        negative = negative and bool(np.all(eigenvalues < -band))
        positive = positive and bool(np.all(eigenvalues > band))
        values.append(float(abs(np.prod(eigenvalues))))
        kept.append(float(omega))

    # pi(infinity) = Gamma
    gamma_eigenvalues = np.linalg.eigvalsh(hermitian_part(p.Gamma))
    gamma_det = float(abs(np.prod(gamma_eigenvalues)))
    gamma_band = tol * max(frobenius(p.Gamma), 1.0)
    negative = negative and bool(np.all(gamma_eigenvalues < -gamma_band))
    positive = positive and bool(np.all(gamma_eigenvalues > gamma_band))

    minima = [
        kept[i]
        for i in range(1, len(values) - 1)
        if values[i] < values[i - 1] and values[i] <= values[i + 1]
    ]

    if values and min(values) <= gamma_det:
        index = int(np.argmin(values))
        min_abs_det, argmin = values[index], kept[index]
    else:
        min_abs_det, argmin = gamma_det, float("inf")

    logger.debug(
        "KY grid scan finished",
        min_abs_det=min_abs_det,
        argmin=argmin,
        skipped=len(skipped),
    )
    return KYReport(
        omega_max=float(omega_max),
        grid_points=grid_points,
        min_abs_det=min_abs_det,
        argmin_omega=argmin,
        negative_definite=negative,
        positive_definite=positive,
        local_minima=minima,
        skipped=skipped,
    )
