"""Hamiltonian matrix construction and spectrum reporting.

For a problem (A, B, G, Gamma) the Hamiltonian is

    R = [[A, -B Gamma^{-1} B^*], [-G, -A^*]],   J = [[0, -I], [I, 0]],

and JR is Hermitian. Its spectrum is symmetric under ``lambda -> -conj(lambda)``;
``spectrum`` pairs the off-axis eigenvalues and clusters the ones that sit on
the imaginary axis.
"""

from dataclasses import dataclass, field

import numpy as np
import structlog
from numpy.typing import ArrayLike

from src.linalg.decompositions import (
    ComplexMatrix,
    as_complex_matrix,
    eigen_general,
    frobenius,
)
from src.problem.model import RiccatiProblem
from src.utils.exceptions import DimensionMismatchError, NotHamiltonianError, PairingFailureError

# Initialize logger
logger = structlog.get_logger(__name__)

DEFAULT_AXIS_TOL = 1e-7
HAMILTONIAN_TOL = 1e-9
CLUSTER_FACTOR = 10.0
PAIRING_FACTOR = 100.0


def symplectic_unit(n: int) -> ComplexMatrix:
    """The matrix ``J = [[0, -I], [I, 0]]`` of size 2n."""
    eye = np.eye(n, dtype=np.complex128)
    zero = np.zeros((n, n), dtype=np.complex128)
    return np.block([[zero, -eye], [eye, zero]])


def hamiltonian_defect(r: ComplexMatrix, j: ComplexMatrix) -> float:
    """Relative skew part ``||JR - (JR)^*|| / ||R||``."""
    jr = j @ r
    scale = frobenius(r)
    return frobenius(jr - jr.conj().T) / scale if scale else 0.0


@dataclass(frozen=True)
class HamiltonianPair:
    """Hamiltonian matrix R with its symplectic unit J."""

    R: ComplexMatrix
    J: ComplexMatrix
    n: int
    source: RiccatiProblem | None = None
    tol: float = HAMILTONIAN_TOL

    @classmethod
    def from_matrix(
        cls, r: ArrayLike, tol: float = HAMILTONIAN_TOL, source: RiccatiProblem | None = None
    ) -> "HamiltonianPair":
        """Wrap an arbitrary 2n x 2n matrix, checking that JR is Hermitian."""
        rm = as_complex_matrix(r, "R")
        if rm.shape[0] != rm.shape[1] or rm.shape[0] % 2:
            error_msg = f"Hamiltonian must be square of even size, got {rm.shape}"
            raise DimensionMismatchError(error_msg, {"shape": list(rm.shape)})
        n = rm.shape[0] // 2
        j = symplectic_unit(n)
        defect = hamiltonian_defect(rm, j)
        if defect > tol:
            error_msg = f"JR is not Hermitian (relative defect {defect:.3e})"
            raise NotHamiltonianError(error_msg, {"defect": defect, "tol": tol})
        return cls(R=rm, J=j, n=n, source=source, tol=tol)

    @property
    def norm(self) -> float:
        return frobenius(self.R)

    def blocks(self) -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix]:
        """Read back the quadrants (A, -Q, -G, -A^*)."""
        n = self.n
        return self.R[:n, :n], self.R[:n, n:], self.R[n:, :n], self.R[n:, n:]


def build_hamiltonian(p: RiccatiProblem) -> HamiltonianPair:
    """Assemble R blockwise from a problem.

    Raises:
        SingularGammaError: If Gamma cannot be inverted
    """
    r = np.block([[p.A, -p.Q], [-p.G, -p.A.conj().T]])
    return HamiltonianPair.from_matrix(r, source=p)


@dataclass(frozen=True)
class AxisGroup:
    """Cluster of eigenvalues on the imaginary axis at one frequency."""

    omega: float
    algebraic_multiplicity: int
    members: list[int]


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: list[complex]
    pairing: list[tuple[int, int]]
    axis_groups: list[AxisGroup]
    off_axis_count: int
    axis_tol: float
    norm: float
    axis_band: float = field(default=0.0)
    unresolved_frequencies: list[float] = field(default_factory=list)

    @property
    def axis_free(self) -> bool:
        return not self.axis_groups

    @property
    def resolved(self) -> bool:
        return not self.unresolved_frequencies

    def axis_frequencies(self) -> list[float]:
        return [group.omega for group in self.axis_groups]


def _cluster(omegas: list[tuple[int, float]], radius: float) -> list[AxisGroup]:
    """Single-linkage clustering of axis frequencies (sorted sweep)."""
    groups: list[AxisGroup] = []
    current: list[tuple[int, float]] = []
    for index, omega in sorted(omegas, key=lambda item: item[1]):
        if current and omega - current[-1][1] > radius:
            groups.append(_group(current))
            current = []
        current.append((index, omega))
    if current:
        groups.append(_group(current))
    return groups


def _group(members: list[tuple[int, float]]) -> AxisGroup:
    return AxisGroup(
        omega=float(np.mean([omega for _, omega in members])),
        algebraic_multiplicity=len(members),
        members=sorted(index for index, _ in members),
    )


def spectrum(hp: HamiltonianPair, axis_tol: float = DEFAULT_AXIS_TOL) -> SpectrumReport:
    """Eigenvalues of R with symmetry pairing and imaginary-axis clustering.

    Args:
        hp: Hamiltonian pair
        axis_tol: Relative band ``|Re lambda| <= axis_tol * ||R||`` counted as
            the imaginary axis

    Returns:
        SpectrumReport

    Raises:
        PairingFailureError: If an off-axis eigenvalue has no mirror partner
    """
    norm = hp.norm
    eigenvalues = eigen_general(hp.R).eigenvalues
    band = axis_tol * norm

    snapped: list[complex] = []
    axis_members: list[tuple[int, float]] = []
    off_axis: list[int] = []
    for index, value in enumerate(eigenvalues):
        if abs(value.real) <= band:
            snapped.append(complex(0.0, value.imag))
            axis_members.append((index, float(value.imag)))
        else:
            snapped.append(complex(value))
            off_axis.append(index)

    groups = _cluster(axis_members, CLUSTER_FACTOR * band)
    unresolved = _near_axis_fragments(snapped, off_axis, axis_tol ** (1 / 3) * norm)
    if unresolved:
        logger.warning("Eigenvalue cluster straddles the imaginary axis", frequencies=unresolved)
    pairing = [(index, index) for index, _ in sorted(axis_members)]
    pairing.extend(_pair_off_axis(snapped, off_axis, PAIRING_FACTOR * band))
    pairing.sort()

    logger.debug(
        "Computed Hamiltonian spectrum",
        dimension=2 * hp.n,
        axis_groups=len(groups),
        off_axis=len(off_axis),
    )
    return SpectrumReport(
        eigenvalues=snapped,
        pairing=pairing,
        axis_groups=groups,
        off_axis_count=len(off_axis),
        axis_tol=axis_tol,
        norm=norm,
        axis_band=band,
        unresolved_frequencies=unresolved,
    )


def _near_axis_fragments(values: list[complex], off_axis: list[int], radius: float) -> list[float]:
    """Frequencies of off-axis eigenvalues that look like pieces of a split axis block.

    A Jordan block of size k splits by about ``eps^(1/k) ||R||`` in floating
    point, which can exceed the axis band. An off-axis eigenvalue within
    radius of the axis that has an axis neighbour, or at least two neighbours,
    within twice the radius is treated as such a fragment.
    """
    outside = set(off_axis)
    fragments: list[float] = []
    for index in off_axis:
        value = values[index]
        if abs(value.real) > radius:
            continue
        neighbours = [
            k for k, other in enumerate(values) if k != index and abs(other - value) <= 2 * radius
        ]
        if len(neighbours) >= 2 or any(k not in outside for k in neighbours):
            fragments.append(float(value.imag))
    return sorted(fragments)


def _pair_off_axis(
    values: list[complex], indices: list[int], radius: float
) -> list[tuple[int, int]]:
    # Largest |Re| first, ties by imaginary part ascending.
    order = sorted(indices, key=lambda i: (-abs(values[i].real), values[i].imag, values[i].real))
    unpaired = set(indices)
    pairs: list[tuple[int, int]] = []
    for index in order:
        if index not in unpaired:
            continue
        unpaired.discard(index)
        mirror = -values[index].conjugate()
        candidates = sorted(unpaired, key=lambda k: abs(values[k] - mirror))
        if not candidates or abs(values[candidates[0]] - mirror) > radius:
            error_msg = f"No mirror partner for eigenvalue {values[index]}"
            raise PairingFailureError(
                error_msg,
                {"eigenvalue": [values[index].real, values[index].imag], "radius": radius},
            )
        partner = candidates[0]
        unpaired.discard(partner)
        pairs.append((min(index, partner), max(index, partner)))
    return pairs
