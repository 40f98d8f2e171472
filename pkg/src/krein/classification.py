"""Krein classification of the imaginary spectrum of a Hamiltonian matrix.

Every Jordan block ``J_j`` of R at ``i omega_j`` has a chain basis ``S_j``
(``R S_j = S_j (i omega_j I + N)``) that can be normalized so that

    S_j^* J S_j = eps_j P,   P[r, k-1-r] = (-1)^(r+1),

with ``eps_j = (-1)^(k/2) beta_j`` for even size k and
``eps_j = (-1)^((k-1)/2) i beta_j`` for odd k. The index ``beta_j`` decides the
type: odd blocks with beta = +1 are of the first type, odd blocks with
beta = -1 of the second type, even blocks are neutral. For a simple
eigenvalue with eigenvector v this is ``beta = sign(v^* (iJ) v)``.

The counting function

    s(omega) = m_plus(omega) - m_minus(omega) - m_zero(omega)

decides solvability: the inequality has a solution iff ``s(omega_j) >= 0``
at every axis frequency.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import scipy.linalg
import structlog

from src.hamiltonian.structure import (
    DEFAULT_AXIS_TOL,
    AxisGroup,
    HamiltonianPair,
    SpectrumReport,
    spectrum,
)
from src.linalg.decompositions import ComplexMatrix
from src.utils.exceptions import (
    AnalysisError,
    ChainExtractionError,
    IndefiniteDegenerateError,
    RankAmbiguityError,
)

# Initialize logger
logger = structlog.get_logger(__name__)

DEFAULT_RANK_TOL = 1e-6
AMBIGUITY_BAND = (0.1, 10.0)


class BlockKind(StrEnum):
    NEUTRAL = "neutral"
    FIRST_TYPE = "first_type"
    SECOND_TYPE = "second_type"


@dataclass(frozen=True)
class JordanBlockInfo:
    """One Jordan block of R on the imaginary axis."""

    omega: float
    size: int
    beta: int
    chain_basis: ComplexMatrix | None = field(default=None, repr=False, compare=False)

    @property
    def kind(self) -> BlockKind:
        if self.size % 2 == 0:
            return BlockKind.NEUTRAL
        return BlockKind.FIRST_TYPE if self.beta > 0 else BlockKind.SECOND_TYPE

    @property
    def n_plus(self) -> int:
        """Eigenvalues of the first type contained in the block."""
        if self.size % 2 == 0:
            return self.size // 2
        return (self.size + self.beta) // 2

    @property
    def n_minus(self) -> int:
        return self.size - self.n_plus

    @property
    def epsilon(self) -> complex:
        return block_epsilon(self.size, self.beta)

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega": self.omega,
            "size": self.size,
            "beta": self.beta,
            "kind": self.kind,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
        }


@dataclass(frozen=True)
class AxisClassification:
    """Jordan blocks on the imaginary axis sorted by frequency."""

    blocks: list[JordanBlockInfo]
    total_axis_multiplicity: int
    frequency_tol: float = 0.0

    @property
    def first_type_count(self) -> int:
        return sum(block.n_plus for block in self.blocks)

    @property
    def second_type_count(self) -> int:
        return sum(block.n_minus for block in self.blocks)

    def frequencies(self) -> list[float]:
        """Distinct block frequencies, ascending."""
        distinct: list[float] = []
        for block in self.blocks:
            if not distinct or block.omega - distinct[-1] > self.frequency_tol:
                distinct.append(block.omega)
        return distinct

    def to_dict(self) -> dict[str, Any]:
        return {
            "blocks": self.blocks,
            "total_axis_multiplicity": self.total_axis_multiplicity,
            "first_type_count": self.first_type_count,
            "second_type_count": self.second_type_count,
        }


@dataclass(frozen=True)
class SolvabilityVerdict:
    """Solvability decision with its evidence.

    ``solvable`` is None when the classification could not be completed; the
    reason is then recorded and no guess is made.
    """

    solvable: bool | None
    s_values: list[tuple[float, int]]
    witness: float | None
    classification: AxisClassification | None
    first_type_count: int = 0
    second_type_count: int = 0
    reason: str | None = None

    @property
    def indeterminate(self) -> bool:
        return self.solvable is None


def sign_pattern(k: int) -> ComplexMatrix:
    """Anti-diagonal matrix P with ``P[r, k-1-r] = (-1)^(r+1)``."""
    p = np.zeros((k, k), dtype=np.complex128)
    for r in range(k):
        p[r, k - 1 - r] = (-1) ** (r + 1)
    return p


def block_epsilon(size: int, beta: int) -> complex:
    if size % 2 == 0:
        return complex((-1) ** (size // 2) * beta)
    return complex((-1) ** ((size - 1) // 2) * 1j * beta)


def beta_from_epsilon(size: int, epsilon: complex) -> int:
    if size % 2 == 0:
        value = (-1) ** (size // 2) * epsilon
    else:
        value = (-1) ** ((size - 1) // 2) * epsilon / 1j
    return 1 if value.real > 0 else -1


def _shifted(hp: HamiltonianPair, omega: float) -> ComplexMatrix:
    return hp.R - 1j * omega * np.eye(2 * hp.n)


def _nullity(
    m: ComplexMatrix, rank_tol: float, omega: float, power: int, scale: float
) -> int:
    """Count singular values of m below ``0.1 * rank_tol * scale``."""
    sigma = scipy.linalg.svdvals(m)
    if scale == 0.0:
        return m.shape[1]
    relative = sigma / scale
    low, high = AMBIGUITY_BAND
    ambiguous = relative[(relative >= low * rank_tol) & (relative <= high * rank_tol)]
    if ambiguous.size:
        error_msg = (
            f"Rank of (R - i*{omega:.6g} I)^{power} is ambiguous at rank_tol={rank_tol:g}; "
            "choose a different tolerance"
        )
        raise RankAmbiguityError(
            error_msg,
            {"omega": omega, "power": power, "singular_values": ambiguous.tolist()},
        )
    return int(np.sum(relative < low * rank_tol))


def jordan_structure(
    hp: HamiltonianPair, group: AxisGroup, rank_tol: float = DEFAULT_RANK_TOL
) -> list[int]:
    """Jordan block sizes at one axis frequency, largest first.

    Uses the nullity staircase ``d_k = dim ker (R - i omega I)^k``: the number
    of blocks of size at least k is ``d_k - d_{k-1}``.

    Raises:
        RankAmbiguityError: If a singular value falls in the ambiguous band or
            the staircase does not reach the algebraic multiplicity
    """
    multiplicity = group.algebraic_multiplicity
    shifted = _shifted(hp, group.omega)
    # Singular values of the k-th power are measured against ||R - i omega I||^k.
    reference = float(scipy.linalg.svdvals(shifted)[0])
    power = np.eye(2 * hp.n, dtype=np.complex128)
    nullities = [0]
    for k in range(1, multiplicity + 1):
        power = power @ shifted
        d_k = _nullity(power, rank_tol, group.omega, k, reference**k)
        if d_k == nullities[-1]:
            break
        nullities.append(d_k)
        if d_k >= multiplicity:
            break

    if nullities[-1] != multiplicity:
        error_msg = (
            f"Nullity staircase at omega={group.omega:.6g} reaches {nullities[-1]}, "
            f"expected algebraic multiplicity {multiplicity}"
        )
        raise RankAmbiguityError(
            error_msg, {"omega": group.omega, "nullities": nullities[1:], "rank_tol": rank_tol}
        )

    at_least = [nullities[k] - nullities[k - 1] for k in range(1, len(nullities))]
    at_least.append(0)
    sizes: list[int] = []
    for k in range(len(at_least) - 1, 0, -1):
        sizes.extend([k] * (at_least[k - 1] - at_least[k]))
    return sizes


def _kernel_basis(m: ComplexMatrix, dimension: int) -> ComplexMatrix:
    _, _, vh = scipy.linalg.svd(m)
    return vh[-dimension:].conj().T


def _semisimple_blocks(
    hp: HamiltonianPair, omega: float, count: int, rank_tol: float
) -> list[JordanBlockInfo]:
    """Split a semisimple eigenvalue by diagonalizing the Gram matrix V^*(iJ)V."""
    basis = _kernel_basis(_shifted(hp, omega), count)
    gram = basis.conj().T @ (1j * hp.J) @ basis
    values, vectors = scipy.linalg.eigh((gram + gram.conj().T) / 2)
    if np.min(np.abs(values)) <= rank_tol:
        error_msg = f"Eigenvector form v*(iJ)v vanishes at omega={omega:.6g}"
        raise IndefiniteDegenerateError(
            error_msg, {"omega": omega, "gram_eigenvalues": values.tolist()}
        )

    blocks = []
    for value, w in zip(values, vectors.T, strict=True):
        v = (basis @ w) / np.sqrt(abs(value))
        beta = 1 if value > 0 else -1
        blocks.append(JordanBlockInfo(omega=omega, size=1, beta=beta, chain_basis=v[:, None]))
    return blocks


def _extract_chain(hp: HamiltonianPair, omega: float, size: int, rank_tol: float) -> ComplexMatrix:
    shifted = _shifted(hp, omega)
    chain = [_kernel_basis(shifted, 1)[:, 0]]
    for _ in range(size - 1):
        target = chain[-1]
        solution, *_ = scipy.linalg.lstsq(shifted, target, cond=rank_tol)
        residual = np.linalg.norm(shifted @ solution - target)
        if residual > np.sqrt(rank_tol) * np.linalg.norm(target):
            error_msg = f"Jordan chain at omega={omega:.6g} cannot be extended to size {size}"
            raise ChainExtractionError(
                error_msg, {"omega": omega, "size": size, "residual": float(residual)}
            )
        chain.append(solution)
    return np.column_stack(chain)


def canonicalize_chain(chain: ComplexMatrix, j: ComplexMatrix) -> tuple[ComplexMatrix, int]:
    """Normalize a Jordan chain so that ``S^* J S = eps P``.

    The Gram matrix of a chain satisfies ``Gm[a, b] = (-1)^a h_{a+b}`` with
    ``h_t = 0`` for ``t < k-1``. Replacing S by ``S C`` with
    ``C = sum_j c_j N^j`` (still a chain) multiplies the generating series
    ``g(x) = sum_t h_{k-1+t} x^t`` by ``c~(x) c(x)``, where
    ``c~(x) = sum_j (-1)^j conj(c_j) x^j``; choosing ``c~ c = g_0 / g`` leaves
    only the anti-diagonal.

    Returns:
        The canonical chain and the block index beta
    """
    k = chain.shape[1]
    gram = chain.conj().T @ j @ chain
    h = np.array([(-1) ** a * gram[a, k - 1] for a in range(k)], dtype=np.complex128)
    if abs(h[0]) == 0.0:
        error_msg = "Jordan chain is J-degenerate"
        raise ChainExtractionError(error_msg, {"size": k})

    ratio = h / h[0]
    inverse = np.zeros(k, dtype=np.complex128)
    inverse[0] = 1.0
    for s in range(1, k):
        inverse[s] = -sum(ratio[t] * inverse[s - t] for t in range(1, s + 1))

    c = np.zeros(k, dtype=np.complex128)
    c[0] = 1.0
    for s in range(1, k):
        rhs = inverse[s] - sum((-1) ** t * np.conj(c[t]) * c[s - t] for t in range(1, s))
        c[s] = rhs.real / 2 if s % 2 == 0 else 1j * rhs.imag / 2

    shift = np.diag(np.ones(k - 1), 1)
    transform = sum(c[t] * np.linalg.matrix_power(shift, t) for t in range(k))
    canonical = chain @ transform / np.sqrt(abs(h[0]))

    epsilon = -h[0] / abs(h[0])
    return canonical, beta_from_epsilon(k, epsilon)


def _blocks_at(
    hp: HamiltonianPair, group: AxisGroup, sizes: list[int], rank_tol: float
) -> list[JordanBlockInfo]:
    if all(size == 1 for size in sizes):
        return _semisimple_blocks(hp, group.omega, len(sizes), rank_tol)
    if len(sizes) > 1:
        error_msg = (
            f"Several non-trivial Jordan blocks {sizes} at omega={group.omega:.6g} "
            "cannot be separated numerically"
        )
        raise ChainExtractionError(error_msg, {"omega": group.omega, "sizes": sizes})

    size = sizes[0]
    chain = _extract_chain(hp, group.omega, size, rank_tol)
    canonical, beta = canonicalize_chain(chain, hp.J)
    return [JordanBlockInfo(omega=group.omega, size=size, beta=beta, chain_basis=canonical)]


def classify_blocks(
    hp: HamiltonianPair,
    report: SpectrumReport | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
) -> AxisClassification:
    """Jordan blocks, indices beta and types of every axis eigenvalue.

    Args:
        hp: Hamiltonian pair
        report: Spectrum report of ``hp`` (computed when omitted)
        rank_tol: Relative rank threshold for the nullity staircase and chains
        axis_tol: Axis band used when the spectrum is computed here

    Returns:
        AxisClassification with blocks sorted by frequency

    Raises:
        RankAmbiguityError: If a Jordan structure cannot be decided or a split
            axis block straddles the axis band
        ChainExtractionError: If a Jordan chain cannot be built
        IndefiniteDegenerateError: If a simple eigenvector is J-neutral
    """
    if report is None:
        report = spectrum(hp, axis_tol)
    _require_resolved(report)

    blocks: list[JordanBlockInfo] = []
    for group in report.axis_groups:
        sizes = jordan_structure(hp, group, rank_tol)
        blocks.extend(_blocks_at(hp, group, sizes, rank_tol))
        logger.debug("Classified axis eigenvalue", omega=group.omega, sizes=sizes)

    blocks.sort(key=lambda block: (block.omega, block.size, block.beta))
    frequency_tol = 10 * report.axis_band
    return AxisClassification(
        blocks=blocks,
        total_axis_multiplicity=sum(g.algebraic_multiplicity for g in report.axis_groups),
        frequency_tol=frequency_tol,
    )


def s_function(c: AxisClassification, omega: float) -> int:
    """Evaluate ``s(omega) = m_plus - m_minus - m_zero``.

    ``m_plus`` counts odd blocks with beta = +1 strictly below omega,
    ``m_minus`` odd blocks with beta = -1 at or below omega and ``m_zero``
    even blocks with beta = -1 at omega.
    """
    tol = c.frequency_tol
    m_plus = sum(1 for b in c.blocks if b.size % 2 and b.beta > 0 and b.omega < omega - tol)
    m_minus = sum(1 for b in c.blocks if b.size % 2 and b.beta < 0 and b.omega <= omega + tol)
    m_zero = sum(
        1 for b in c.blocks if b.size % 2 == 0 and b.beta < 0 and abs(b.omega - omega) <= tol
    )
    return m_plus - m_minus - m_zero


def _require_resolved(report: SpectrumReport) -> None:
    if report.resolved:
        return
    error_msg = (
        f"Eigenvalues near i*{report.unresolved_frequencies[0]:.6g} split off the imaginary "
        f"axis beyond axis_tol={report.axis_tol:g}; the Jordan structure cannot be resolved"
    )
    raise RankAmbiguityError(
        error_msg,
        {"frequencies": report.unresolved_frequencies, "axis_tol": report.axis_tol},
    )


def _indeterminate(err: AnalysisError) -> SolvabilityVerdict:
    logger.warning("Axis classification failed", code=err.code, error=err.message)
    return SolvabilityVerdict(
        solvable=None,
        s_values=[],
        witness=None,
        classification=None,
        reason=f"{err.code}: {err.message}",
    )


def verdict(
    hp: HamiltonianPair,
    axis_tol: float = DEFAULT_AXIS_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> SolvabilityVerdict:
    """Decide solvability from the classification of the axis spectrum.

    Failed pairings, clusters straddling the axis band and classification
    failures produce an indeterminate verdict carrying the failure reason
    rather than a guess.
    """
    try:
        report = spectrum(hp, axis_tol)
        _require_resolved(report)
        if report.axis_free:
            logger.info("No imaginary eigenvalues; inequality is solvable")
            return SolvabilityVerdict(
                solvable=True,
                s_values=[],
                witness=None,
                classification=AxisClassification(blocks=[], total_axis_multiplicity=0),
            )
        classification = classify_blocks(hp, report, rank_tol=rank_tol)
    except AnalysisError as err:
        return _indeterminate(err)

    s_values = [
        (omega, s_function(classification, omega)) for omega in classification.frequencies()
    ]
    negative = [omega for omega, value in s_values if value < 0]
    solvable = not negative
    logger.info(
        "Solvability verdict",
        solvable=solvable,
        frequencies=len(s_values),
        first_type=classification.first_type_count,
        second_type=classification.second_type_count,
    )
    return SolvabilityVerdict(
        solvable=solvable,
        s_values=s_values,
        witness=negative[0] if negative else None,
        classification=classification,
        first_type_count=classification.first_type_count,
        second_type_count=classification.second_type_count,
    )
