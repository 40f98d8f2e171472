import numpy as np
import pytest

from src.hamiltonian.structure import HamiltonianPair, build_hamiltonian, symplectic_unit
from src.krein.canonical import CanonicalBlock, canonical_hamiltonian
from src.krein.classification import (
    AxisClassification,
    BlockKind,
    JordanBlockInfo,
    canonicalize_chain,
    classify_blocks,
    s_function,
    sign_pattern,
    verdict,
)
from src.problem.model import RiccatiProblem
from src.utils.exceptions import (
    ChainExtractionError,
    IndefiniteDegenerateError,
    RankAmbiguityError,
)

# Constants
SEED = 11
UNSOLVABLE_LEVELS = (0.1, 1.0, 10.0)
SIZE_THREE_AXIS_TOL = 1e-4


def _blocks(c: AxisClassification) -> list[tuple[float, int, int]]:
    return [(round(b.omega, 6) + 0.0, b.size, b.beta) for b in c.blocks]


class TestGroundTruth:
    """Classification of the R = J and R = -J instances."""

    def test_classify_blocks_with_r_equals_j_types_minus_one_first(self):
        """R = J: first type at omega = -1, second type at omega = +1."""
        # Act
        c = classify_blocks(HamiltonianPair.from_matrix(symplectic_unit(1)))

        # Assert
        assert _blocks(c) == [(-1.0, 1, 1), (1.0, 1, -1)]
        assert [b.kind for b in c.blocks] == [BlockKind.FIRST_TYPE, BlockKind.SECOND_TYPE]
        assert (c.first_type_count, c.second_type_count) == (1, 1)

    def test_verdict_with_r_equals_j_is_solvable_with_zero_counts(self):
        """s = {0, 0} for R = J."""
        # Act
        result = verdict(HamiltonianPair.from_matrix(symplectic_unit(1)))

        # Assert
        assert result.solvable is True
        assert [value for _, value in result.s_values] == [0, 0]
        assert result.witness is None

    def test_verdict_with_r_equals_minus_j_is_unsolvable_at_minus_one(self):
        """R = -J: first type at +1, second type at -1, s(-1) = -1."""
        # Act
        result = verdict(HamiltonianPair.from_matrix(-symplectic_unit(1)))

        # Assert
        assert _blocks(result.classification) == [(-1.0, 1, -1), (1.0, 1, 1)]
        assert result.solvable is False
        assert result.s_values[0] == (pytest.approx(-1.0), -1)
        assert result.witness == pytest.approx(-1.0)

    @pytest.mark.parametrize("level", UNSOLVABLE_LEVELS)
    def test_verdict_with_positive_g_and_negative_gamma_reports_witness(self, level):
        """A=0, B=1, G=c, Gamma=-1: c + h^2 > 0 for every h, witness -sqrt(c)."""
        # Arrange
        p = RiccatiProblem([[0.0]], [[1.0]], [[level]], [[-1.0]])

        # Act
        result = verdict(build_hamiltonian(p))

        # Assert
        assert result.solvable is False
        assert result.witness == pytest.approx(-np.sqrt(level))

    def test_classify_blocks_with_double_eigenvalues_splits_gram_matrix(self):
        """R = J with n = 2: two first-type eigenvectors at -1, two second-type at +1."""
        # Act
        c = classify_blocks(HamiltonianPair.from_matrix(symplectic_unit(2)))

        # Assert
        assert _blocks(c) == [(-1.0, 1, 1), (-1.0, 1, 1), (1.0, 1, -1), (1.0, 1, -1)]
        assert all(b.chain_basis.shape == (4, 1) for b in c.blocks)


class TestCanonicalInstances:
    """Classification of constructed Hamiltonians with known Jordan structure."""

    @pytest.mark.parametrize("beta", [1, -1])
    def test_classify_blocks_with_size_two_block_recovers_beta(self, beta):
        """Even blocks: size and index survive a random unitary change of basis."""
        # Arrange
        hp, expected = canonical_hamiltonian([CanonicalBlock(0.0, 2, beta)], seed=SEED)

        # Act
        c = classify_blocks(hp, axis_tol=SIZE_THREE_AXIS_TOL)

        # Assert
        assert _blocks(c) == _blocks(expected) == [(0.0, 2, beta)]
        assert c.blocks[0].kind is BlockKind.NEUTRAL

    @pytest.mark.parametrize("beta", [1, -1])
    def test_classify_blocks_with_size_three_block_recovers_beta(self, beta):
        """Odd blocks: the index of a size-3 block balanced by a simple block."""
        # Arrange
        hp, _ = canonical_hamiltonian(
            [CanonicalBlock(0.0, 3, beta), CanonicalBlock(5.0, 1, -beta)], seed=SEED
        )

        # Act
        c = classify_blocks(hp, axis_tol=SIZE_THREE_AXIS_TOL)

        # Assert
        assert [(round(b.omega, 3) + 0.0, b.size, b.beta) for b in c.blocks] == [
            (0.0, 3, beta),
            (5.0, 1, -beta),
        ]

    def test_verdict_with_negative_even_block_is_unsolvable(self):
        """An even block with beta = -1 gives s(omega) = -1."""
        # Arrange
        hp, _ = canonical_hamiltonian([CanonicalBlock(0.0, 2, -1)], seed=SEED)

        # Act
        result = verdict(hp, axis_tol=SIZE_THREE_AXIS_TOL)

        # Assert
        assert result.solvable is False

    def test_verdict_with_opposite_simple_blocks_at_one_frequency_is_unsolvable(self):
        """Two simple blocks of opposite type at one frequency: s = 0 - 1."""
        # Arrange
        hp, _ = canonical_hamiltonian(
            [CanonicalBlock(2.0, 1, 1), CanonicalBlock(2.0, 1, -1)], seed=SEED
        )

        # Act
        result = verdict(hp)

        # Assert
        assert result.classification.first_type_count == 1
        assert result.classification.second_type_count == 1
        assert result.solvable is False

    def test_verdict_with_failed_classification_is_indeterminate(self, mocker):
        """Classification errors become an indeterminate verdict with a reason."""
        # Arrange
        mocker.patch(
            "src.krein.classification.classify_blocks",
            side_effect=RankAmbiguityError("ambiguous rank", {"omega": 1.0}),
        )

        # Act
        result = verdict(HamiltonianPair.from_matrix(symplectic_unit(1)))

        # Assert
        assert result.indeterminate
        assert result.reason == "rank_ambiguity: ambiguous rank"

    def test_verdict_with_axis_free_hamiltonian_is_solvable(self):
        """No imaginary eigenvalues: solvable without classification."""
        # Arrange
        p = RiccatiProblem([[-1.0]], [[1.0]], [[1.0]], [[1.0]])

        # Act
        result = verdict(build_hamiltonian(p))

        # Assert
        assert result.solvable is True
        assert result.s_values == []


class TestCanonicalizeChain:
    """Tests for chain normalization."""

    @pytest.mark.parametrize(("size", "beta"), [(2, 1), (3, -1), (4, -1)])
    def test_canonicalize_chain_with_mixed_chain_restores_anti_diagonal(self, size, beta):
        """S C for an upper-triangular Toeplitz C is a chain; its canonical form is eps P."""
        # Arrange
        blocks = [CanonicalBlock(1.0, size, beta)]
        if size % 2:
            blocks.append(CanonicalBlock(-3.0, 1, -beta))
        hp, expected = canonical_hamiltonian(blocks, seed=SEED)
        block = next(b for b in expected.blocks if b.size == size)
        rng = np.random.default_rng(SEED)
        coefficients = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        shift = np.diag(np.ones(size - 1), 1)
        mixing = sum(c * np.linalg.matrix_power(shift, t) for t, c in enumerate(coefficients))

        # Act
        canonical, found_beta = canonicalize_chain(block.chain_basis @ mixing, hp.J)

        # Assert
        gram = canonical.conj().T @ hp.J @ canonical
        assert found_beta == beta
        assert np.allclose(gram, block.epsilon * sign_pattern(size), atol=1e-8)


class TestSFunction:
    """Tests for the counting function on hand-made classifications."""

    def test_s_function_with_mixed_blocks_counts_each_rule(self):
        """Odd beta=+1 below, odd beta=-1 at or below and even beta=-1 at omega."""
        # Arrange
        c = AxisClassification(
            blocks=[
                JordanBlockInfo(omega=-2.0, size=1, beta=1),
                JordanBlockInfo(omega=-2.0, size=3, beta=1),
                JordanBlockInfo(omega=0.0, size=2, beta=-1),
                JordanBlockInfo(omega=1.0, size=1, beta=-1),
            ],
            total_axis_multiplicity=7,
        )

        # Act & Assert
        assert s_function(c, -2.0) == 0
        assert s_function(c, 0.0) == 1
        assert s_function(c, 1.0) == 1
        assert c.frequencies() == [-2.0, 0.0, 1.0]

    def test_jordan_block_info_with_size_three_counts_types(self):
        """A size-3 block with beta = +1 holds two first-type eigenvalues."""
        # Arrange
        block = JordanBlockInfo(omega=0.0, size=3, beta=1)

        # Act & Assert
        assert (block.n_plus, block.n_minus) == (2, 1)
        assert block.kind is BlockKind.FIRST_TYPE


class TestUnresolvedStructure:
    """Axis structure the classifier refuses to guess."""

    def test_verdict_with_size_three_block_at_default_tolerance_never_claims_solvable(self):
        """A size-3 block splits by about eps^(1/3); s(0) = -1 for beta = -1."""
        # Arrange
        hp, _ = canonical_hamiltonian(
            [CanonicalBlock(0.0, 3, -1), CanonicalBlock(5.0, 1, 1)], seed=SEED
        )

        # Act
        result = verdict(hp)

        # Assert
        assert result.solvable is not True
        if result.indeterminate:
            assert result.reason

    def test_classify_blocks_with_two_even_blocks_at_one_frequency_raises_error(self):
        """Two non-trivial blocks sharing a frequency cannot be separated."""
        # Arrange
        hp, _ = canonical_hamiltonian(
            [CanonicalBlock(0.5, 2, 1), CanonicalBlock(0.5, 2, -1)], seed=SEED
        )

        # Act & Assert
        with pytest.raises(ChainExtractionError, match="Several non-trivial"):
            classify_blocks(hp, axis_tol=SIZE_THREE_AXIS_TOL)

    def test_verdict_with_two_even_blocks_at_one_frequency_is_indeterminate(self):
        """The chain failure surfaces as the reason of an indeterminate verdict."""
        # Arrange
        hp, _ = canonical_hamiltonian(
            [CanonicalBlock(0.5, 2, 1), CanonicalBlock(0.5, 2, -1)], seed=SEED
        )

        # Act
        result = verdict(hp, axis_tol=SIZE_THREE_AXIS_TOL)

        # Assert
        assert result.indeterminate
        assert result.reason.startswith("chain_extraction_failure")
        assert result.classification is None

    def test_classify_blocks_with_j_neutral_eigenvector_raises_error(self, mocker):
        """A kernel vector with v*(iJ)v = 0 has no type."""
        # Arrange
        mocker.patch(
            "src.krein.classification._kernel_basis",
            return_value=np.array([[1.0], [0.0]], dtype=np.complex128),
        )

        # Act & Assert
        with pytest.raises(IndefiniteDegenerateError):
            classify_blocks(HamiltonianPair.from_matrix(symplectic_unit(1)))

    def test_verdict_with_unpaired_eigenvalue_is_indeterminate(self):
        """1 + i has no mirror -1 + i in diag(1 + i, 2)."""
        # Arrange
        r = np.diag([1 + 1j, 2 + 0j])
        hp = HamiltonianPair(R=r, J=symplectic_unit(1), n=1)

        # Act
        result = verdict(hp)

        # Assert
        assert result.indeterminate
        assert result.reason.startswith("pairing_failure")
