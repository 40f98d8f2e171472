"""Rank-one Hamiltonian updates and the probe matrix M.

``R + V (JV)^*`` stays Hamiltonian for any V, and with ``M = sum V_j V_j^*``
the family ``R - t M J`` collects such updates. Choosing ``V_j`` parallel to
the last column of the canonical chain ``S_j`` of an axis block makes the
block's eigenvalues move in a direction fixed by its index beta.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike

from src.hamiltonian.structure import HamiltonianPair
from src.krein.classification import AxisClassification
from src.linalg.decompositions import ComplexMatrix, as_complex_matrix, describe
from src.utils.exceptions import (
    DimensionMismatchError,
    MissingChainBasisError,
    NotPositiveDefiniteError,
)

# Initialize logger
logger = structlog.get_logger(__name__)


def rank_one_update(hp: HamiltonianPair, v: ArrayLike) -> HamiltonianPair:
    """Return the Hamiltonian ``R + V (JV)^*`` for a 2n x k matrix (or vector) V.

    Raises:
        DimensionMismatchError: If V does not have 2n rows
    """
    vm = np.asarray(v, dtype=np.complex128)
    if vm.ndim == 1:
        vm = vm[:, None]
    if vm.ndim != 2 or vm.shape[0] != 2 * hp.n:
        error_msg = f"V must have {2 * hp.n} rows, got shape {vm.shape}"
        raise DimensionMismatchError(error_msg, {"shape": list(vm.shape), "rows": 2 * hp.n})
    updated = hp.R + vm @ (hp.J @ vm).conj().T
    return HamiltonianPair.from_matrix(updated, tol=hp.tol, source=hp.source)


def secular_factor(hp: HamiltonianPair, v: ArrayLike, lam: complex) -> complex:
    """Scalar ``1 + (Jv)^* (R - lam I)^{-1} v``.

    ``det(R + v (Jv)^* - lam I) = det(R - lam I) * secular_factor(hp, v, lam)``.
    """
    vv = np.asarray(v, dtype=np.complex128).reshape(-1)
    resolvent_v = scipy.linalg.solve(hp.R - lam * np.eye(2 * hp.n), vv)
    return complex(1 + np.vdot(hp.J @ vv, resolvent_v))


@dataclass(frozen=True)
class ProbeMatrix:
    """Positive semidefinite ``M = sum V_j V_j^*`` built from axis chains."""

    M: ComplexMatrix
    generators: list[ComplexMatrix]
    targeted_blocks: list[int]
    generator_omegas: list[float | None] = field(default_factory=list)
    orthogonality_defect: float = 0.0

    @classmethod
    def from_matrix(cls, m: ArrayLike) -> "ProbeMatrix":
        """Probe from a positive semidefinite matrix; its generators target no block."""
        mm = as_complex_matrix(m, "M")
        values, vectors = scipy.linalg.eigh((mm + mm.conj().T) / 2)
        if values.size and values[0] < -1e-12 * max(abs(values[-1]), 1.0):
            error_msg = f"M must be positive semidefinite (smallest eigenvalue {values[0]:.3e})"
            raise NotPositiveDefiniteError(error_msg, {"min_eigenvalue": float(values[0])})
        generators = [np.sqrt(v) * vectors[:, i] for i, v in enumerate(values) if v > 0]
        return cls(
            M=mm,
            generators=generators,
            targeted_blocks=[],
            generator_omegas=[None] * len(generators),
        )

    @property
    def rank(self) -> int:
        return len(self.generators)

    def scaled(self, t: float, freeze_times: Sequence[float] | None = None) -> ComplexMatrix:
        """``sum_k min(t, tau_k) V_k V_k^*``; generator k stops growing at ``tau_k``."""
        taus = [np.inf] * self.rank if freeze_times is None else list(freeze_times)
        size = self.M.shape[0]
        m = np.zeros((size, size), dtype=np.complex128)
        for tau, v in zip(taus, self.generators, strict=True):
            m += min(t, tau) * np.outer(v, v.conj())
        return m

    def augmented(self, extra: ArrayLike) -> "ProbeMatrix":
        """Append the generators of a positive semidefinite matrix; they target no block."""
        other = ProbeMatrix.from_matrix(extra)
        return ProbeMatrix(
            M=self.M + other.M,
            generators=self.generators + other.generators,
            targeted_blocks=self.targeted_blocks,
            generator_omegas=self.generator_omegas + other.generator_omegas,
            orthogonality_defect=self.orthogonality_defect,
        )

    def perturbed(self, hp: HamiltonianPair, t: float) -> HamiltonianPair:
        """The Hamiltonian ``R - t M J``."""
        return HamiltonianPair.from_matrix(hp.R - t * self.M @ hp.J, tol=hp.tol, source=hp.source)


def construct_probe(
    hp: HamiltonianPair,
    classification: AxisClassification,
    delta: float = 1.0,
    targets: Sequence[int] | None = None,
) -> ProbeMatrix:
    """Build M from the last chain vectors of the targeted blocks.

    ``V_j = -delta * conj(eps_j) * s_last`` so that ``S_j^* J V_j = (delta, 0, ..., 0)``.

    Args:
        hp: Hamiltonian pair the classification belongs to
        classification: Axis classification with chain bases
        delta: Generator length
        targets: Indices into ``classification.blocks`` (all blocks when None)

    Raises:
        MissingChainBasisError: If a targeted block has no chain basis
    """
    indices = list(range(len(classification.blocks))) if targets is None else list(targets)
    generators: list[ComplexMatrix] = []
    omegas: list[float | None] = []
    for index in indices:
        block = classification.blocks[index]
        if block.chain_basis is None:
            error_msg = f"Block {index} at omega={block.omega:.6g} has no chain basis"
            raise MissingChainBasisError(error_msg, {"block": index, "omega": block.omega})
        chain = as_complex_matrix(block.chain_basis, "chain_basis")
        generators.append(-delta * np.conj(block.epsilon) * chain[:, -1])
        omegas.append(block.omega)

    defect = 0.0
    for j, v in enumerate(generators):
        jv = hp.J @ v
        for k, index in enumerate(indices):
            if k == j:
                continue
            chain = classification.blocks[index].chain_basis
            defect = max(defect, float(np.max(np.abs(chain.conj().T @ jv))))

    m = sum((np.outer(v, v.conj()) for v in generators), np.zeros((2 * hp.n, 2 * hp.n), complex))
    logger.debug(
        "Constructed probe matrix", generators=len(generators), defect=defect, **describe(m)
    )
    return ProbeMatrix(
        M=m,
        generators=generators,
        targeted_blocks=indices,
        generator_omegas=omegas,
        orthogonality_defect=defect,
    )
