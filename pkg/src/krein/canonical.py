"""Hamiltonian matrices with prescribed imaginary-axis Jordan structure.

Builds ``R = T R_c T^*`` from a block-diagonal canonical matrix ``R_c`` and a
unitary ``T`` mapping the canonical Hermitian form ``K_c`` onto ``iJ``. Each
axis block contributes ``i omega I + N`` with form ``i eps P``; each off-axis
eigenvalue lambda contributes ``diag(lambda, -conj(lambda))`` with form
``[[0, 1], [1, 0]]``. The columns of T belonging to a block are its canonical
chain basis, so the returned classification is exact by construction.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from src.hamiltonian.structure import HamiltonianPair, symplectic_unit
from src.krein.classification import (
    AxisClassification,
    JordanBlockInfo,
    block_epsilon,
    sign_pattern,
)
from src.linalg.decompositions import ComplexMatrix


@dataclass(frozen=True)
class CanonicalBlock:
    omega: float
    size: int
    beta: int


def _axis_block(block: CanonicalBlock) -> tuple[ComplexMatrix, ComplexMatrix]:
    k = block.size
    jordan = 1j * block.omega * np.eye(k) + np.diag(np.ones(k - 1), 1)
    form = 1j * block_epsilon(k, block.beta) * sign_pattern(k)
    return jordan.astype(np.complex128), form


def _off_axis_block(value: complex) -> tuple[ComplexMatrix, ComplexMatrix]:
    jordan = np.diag([value, -np.conj(value)]).astype(np.complex128)
    form = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    return jordan, form


def canonical_hamiltonian(
    blocks: Sequence[CanonicalBlock],
    off_axis: Sequence[complex] = (),
    seed: int | None = None,
) -> tuple[HamiltonianPair, AxisClassification]:
    """Hamiltonian with the given axis blocks and off-axis mirror pairs.

    Args:
        blocks: Axis Jordan blocks (frequency, size, index beta)
        off_axis: Eigenvalues with nonzero real part; each also brings its
            mirror ``-conj(lambda)``
        seed: Seed for a random unitary mixing inside the eigenspaces of iJ

    Returns:
        The Hamiltonian pair and its exact classification (with chain bases)

    Raises:
        ValueError: If the blocks do not balance the inertia of iJ
    """
    pieces = [_axis_block(b) for b in blocks] + [_off_axis_block(v) for v in off_axis]
    if not pieces:
        error_msg = "At least one block is required"
        raise ValueError(error_msg)
    for value in off_axis:
        if value.real == 0:
            error_msg = f"Off-axis eigenvalue {value} lies on the imaginary axis"
            raise ValueError(error_msg)

    r_c = scipy.linalg.block_diag(*[p[0] for p in pieces])
    k_c = scipy.linalg.block_diag(*[p[1] for p in pieces])
    form_values, w = scipy.linalg.eigh(k_c)
    positives = int(np.sum(form_values > 0))
    dimension = k_c.shape[0]
    if 2 * positives != dimension:
        error_msg = (
            f"Blocks give {positives} positive and {dimension - positives} negative "
            "directions of the form; they must balance"
        )
        raise ValueError(error_msg)

    n = dimension // 2
    j = symplectic_unit(n)
    _, u = scipy.linalg.eigh(1j * j)
    if seed is not None and n > 1:
        rng = np.random.default_rng(seed)
        mixing = scipy.linalg.block_diag(
            unitary_group.rvs(n, random_state=rng), unitary_group.rvs(n, random_state=rng)
        )
        u = u @ mixing
    t = u @ w.conj().T
    r = t @ r_c @ t.conj().T
    hp = HamiltonianPair.from_matrix(r)

    infos: list[JordanBlockInfo] = []
    offset = 0
    for block in blocks:
        chain = t[:, offset : offset + block.size]
        infos.append(
            JordanBlockInfo(omega=block.omega, size=block.size, beta=block.beta, chain_basis=chain)
        )
        offset += block.size
    infos.sort(key=lambda b: (b.omega, b.size, b.beta))

    classification = AxisClassification(
        blocks=infos,
        total_axis_multiplicity=sum(b.size for b in blocks),
    )
    return hp, classification
