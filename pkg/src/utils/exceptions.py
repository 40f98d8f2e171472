"""Exception hierarchy for the Riccati inequality analyzer.

Every failure a caller can act on is an ``AnalysisError`` subclass carrying a
stable machine-readable ``code`` and a ``context`` dictionary. The CLI maps
these onto structured JSON error objects.
"""

from typing import Any, ClassVar


class AnalysisError(Exception):
    """Base class for all domain errors."""

    code: ClassVar[str] = "analysis_error"

    def __init__(self, message: str, context: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def to_payload(self) -> dict[str, Any]:
        """Render the error as a ``{code, message, context}`` mapping."""
        return {"code": self.code, "message": self.message, "context": self.context}


class NonConvergenceError(AnalysisError):
    code = "non_convergence"


class NotHermitianError(AnalysisError):
    code = "not_hermitian"


class NotHamiltonianError(AnalysisError):
    code = "not_hamiltonian"


class AxisEigenvalueError(AnalysisError):
    code = "axis_eigenvalue"


class DimensionMismatchError(AnalysisError):
    code = "dimension_mismatch"


class SingularGammaError(AnalysisError):
    code = "singular_gamma"


class NotPositiveDefiniteError(AnalysisError):
    code = "not_positive_definite"


class ResonantFrequencyError(AnalysisError):
    code = "resonant_frequency"


class PairingFailureError(AnalysisError):
    code = "pairing_failure"


class RankAmbiguityError(AnalysisError):
    code = "rank_ambiguity"


class ChainExtractionError(AnalysisError):
    code = "chain_extraction_failure"


class IndefiniteDegenerateError(AnalysisError):
    code = "indefinite_degenerate"


class SingularX1Error(AnalysisError):
    code = "singular_x1"


class ClosedLoopError(AnalysisError):
    """Closed-loop spectrum is not in the half-plane the mode promises."""

    code = "closed_loop_violation"


class NotSolvableError(AnalysisError):
    code = "not_solvable"


class SearchExhaustedError(AnalysisError):
    code = "search_exhausted"


class MissingChainBasisError(AnalysisError):
    code = "missing_chain_basis"


class MatchingAmbiguityError(AnalysisError):
    code = "matching_ambiguity"


class ParseError(AnalysisError):
    code = "parse_error"
