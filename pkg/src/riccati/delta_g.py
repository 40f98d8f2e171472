"""Search for a positive definite Delta G with an axis-free ``R_new``.

If ``HA + A^*H + G + Delta G - HQH = 0`` has a stabilizing solution and
``Delta G`` is positive definite, H solves the strict inequality for G.
``R_new`` is the Hamiltonian of the problem with ``G + Delta G``. A candidate
is accepted when ``R_new`` keeps its eigenvalues away from the imaginary axis
and the top blocks X1, X2 of both half-plane subspace bases are nonsingular.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike

from src.hamiltonian.structure import (
    DEFAULT_AXIS_TOL,
    build_hamiltonian,
    spectrum,
)
from src.krein.classification import (
    DEFAULT_RANK_TOL,
    SolvabilityVerdict,
    classify_blocks,
    verdict,
)
from src.linalg.decompositions import (
    DEFAULT_TOL,
    ComplexMatrix,
    HalfPlane,
    as_complex_matrix,
    check_hermitian,
    frobenius,
    hermitian_part,
    stable_invariant_basis,
)
from src.migration.perturbation import ProbeMatrix, construct_probe
from src.migration.trace import trace_eigenvalues
from src.problem.model import RiccatiProblem, min_eigenvalue
from src.utils.config import SearchConfig
from src.utils.exceptions import (
    AnalysisError,
    NotPositiveDefiniteError,
    NotSolvableError,
    SearchExhaustedError,
)

# Initialize logger
logger = structlog.get_logger(__name__)

PROBE_REGULARIZATION = 0.1
RAMP_NOISE = 0.1
MIGRATION_HORIZON = 1.5
JITTER_SCALE = 0.1
BISECTION_RATIO = 1.001


class DeltaGStrategy(StrEnum):
    AUTO = "auto"
    SCALED_IDENTITY = "scaled-identity"
    MIGRATION = "migration"
    USER = "user"


@dataclass(frozen=True)
class DeltaGResult:
    delta_g: ComplexMatrix
    axis_free: bool
    iterations: int
    strategy: DeltaGStrategy
    epsilon: float | None = None
    homotopy_t: float | None = None
    frozen_generators: int = 0
    probe_fallback: str | None = None


def _x_condition(r: ComplexMatrix, n: int, half: HalfPlane, tol: float) -> float:
    z = stable_invariant_basis(r, half, tol)
    sigma = scipy.linalg.svdvals(z[:n])
    return float(sigma[0] / sigma[-1]) if sigma[-1] > 0 else float("inf")


class _Acceptance:
    """Acceptance test for candidate Delta G matrices of one problem."""

    def __init__(self, p: RiccatiProblem, tol: float, axis_tol: float) -> None:
        self.p = p
        self.tol = tol
        self.separation = max(np.sqrt(tol), axis_tol)
        self.condition_limit = 1 / (100 * tol)
        self.evaluations = 0

    def separated(self, delta_g: ComplexMatrix) -> bool:
        r = build_hamiltonian(self.p.with_g(self.p.G + delta_g)).R
        self.evaluations += 1
        values = scipy.linalg.eigvals(r)
        return bool(np.min(np.abs(values.real)) > self.separation * max(frobenius(r), 1.0))

    def nonsingular(self, delta_g: ComplexMatrix) -> bool:
        r = build_hamiltonian(self.p.with_g(self.p.G + delta_g)).R
        try:
            conditions = [
                _x_condition(r, self.p.n, half, self.tol)
                for half in (HalfPlane.LEFT, HalfPlane.RIGHT)
            ]
        except AnalysisError:
            return False
        return max(conditions) <= self.condition_limit

    def accepts(self, delta_g: ComplexMatrix) -> bool:
        return self.separated(delta_g) and self.nonsingular(delta_g)


def _random_positive_definite(
    p: RiccatiProblem, rng: np.random.Generator, size: int | None = None
) -> ComplexMatrix:
    """Unit-norm ``W W^* + I``, real when the problem data are real."""
    size = size or 2 * p.n
    w = rng.standard_normal((size, size)).astype(np.complex128)
    if any(np.any(m.imag) for m in (p.A, p.B, p.G, p.Gamma)):
        w = w + 1j * rng.standard_normal((size, size))
    direction = w @ w.conj().T + np.eye(size)
    return direction / frobenius(direction)


def _jittered(
    accept: _Acceptance, delta_g: ComplexMatrix, retries: int, seed: int
) -> ComplexMatrix | None:
    """Try small random positive definite additions when X1 or X2 is singular."""
    rng = np.random.default_rng(seed)
    n = delta_g.shape[0]
    size = JITTER_SCALE * max(min_eigenvalue(delta_g), np.finfo(float).eps)
    for attempt in range(retries):
        direction = _random_positive_definite(accept.p, rng, n)
        candidate = delta_g + size * (attempt + 1) * direction
        if accept.accepts(candidate):
            logger.debug("Jitter accepted", attempt=attempt + 1)
            return candidate
    return None


def _candidate(
    accept: _Acceptance, delta_g: ComplexMatrix, search: SearchConfig
) -> ComplexMatrix | None:
    if not accept.separated(delta_g):
        return None
    if accept.nonsingular(delta_g):
        return delta_g
    return _jittered(accept, delta_g, search.jitter_retries, search.seed)


def _scaled_identity(
    p: RiccatiProblem, search: SearchConfig, tol: float, axis_tol: float
) -> DeltaGResult:
    accept = _Acceptance(p, tol, axis_tol)
    g_norm = frobenius(p.G) or 1.0
    identity = np.eye(p.n, dtype=np.complex128)
    lo, hi = search.eps_min_factor * g_norm, search.eps_max_factor * g_norm

    found = _candidate(accept, lo * identity, search)
    if found is not None:
        return DeltaGResult(found, True, accept.evaluations, DeltaGStrategy.SCALED_IDENTITY, lo)

    bad, good, good_matrix = lo, None, None
    for eps in np.geomspace(lo, hi, max(search.bisection_steps, 2))[1:]:
        found = _candidate(accept, eps * identity, search)
        logger.debug("Scaled identity scan", epsilon=float(eps), accepted=found is not None)
        if found is not None:
            good, good_matrix = float(eps), found
            break
        bad = float(eps)

    if good is None:
        error_msg = (
            f"No epsilon in [{lo:.3e}, {hi:.3e}] gives an axis-free R_new with nonsingular X1, X2"
        )
        context = {
            "strategy": DeltaGStrategy.SCALED_IDENTITY.value,
            "evaluations": accept.evaluations,
        }
        raise SearchExhaustedError(error_msg, context)

    for _ in range(search.bisection_steps):
        if good / bad <= BISECTION_RATIO:
            break
        mid = float(np.sqrt(bad * good))
        found = _candidate(accept, mid * identity, search)
        if found is None:
            bad = mid
        else:
            good, good_matrix = mid, found

    logger.info("Scaled identity Delta G found", epsilon=good, evaluations=accept.evaluations)
    return DeltaGResult(
        good_matrix, True, accept.evaluations, DeltaGStrategy.SCALED_IDENTITY, epsilon=good
    )


def migration_delta_g(
    p: RiccatiProblem, m: ComplexMatrix, tol: float = DEFAULT_TOL
) -> ComplexMatrix:
    """Delta G realized by the Hamiltonian ``R - M J``.

    With H from the stable subspace of ``R - MJ``,
    ``HA + A^*H + G + [-H, I] M [-H, I]^* - HQH = 0``.
    """
    hp = build_hamiltonian(p)
    z = stable_invariant_basis(hp.R - m @ hp.J, HalfPlane.LEFT, tol)
    x1, psi1 = z[: p.n], z[p.n :]
    h = hermitian_part(scipy.linalg.solve(x1.T, psi1.T).T)
    w = np.hstack([-h, np.eye(p.n)])
    return hermitian_part(w @ m @ w.conj().T)


def _regularization_direction(p: RiccatiProblem, rng: np.random.Generator) -> ComplexMatrix:
    """Unit-norm positive definite direction: an eigenvalue ramp plus a small random part."""
    size = 2 * p.n
    ramp = np.diag(np.arange(1.0, size + 1.0)).astype(np.complex128)
    direction = ramp + RAMP_NOISE * frobenius(ramp) * _random_positive_definite(p, rng, size)
    return direction / frobenius(direction)


def _migration(
    p: RiccatiProblem,
    search: SearchConfig,
    tol: float,
    axis_tol: float,
    rank_tol: float,
) -> DeltaGResult:
    """Follow ``R - t M J`` with generators frozen once their blocks meet.

    M is the probe matrix of the axis blocks plus a small regularization
    direction that keeps the homotopy generic. Each traced t is a candidate
    ``Delta G`` read off ``R - M(t) J``.
    """
    accept = _Acceptance(p, tol, axis_tol)
    hp = build_hamiltonian(p)
    scale = hp.norm or 1.0
    fallback: str | None = None
    try:
        classification = classify_blocks(hp, rank_tol=rank_tol, axis_tol=axis_tol)
        probe = construct_probe(hp, classification)
        frequencies = [block.omega for block in classification.blocks]
    except AnalysisError as err:
        logger.warning("No probe matrix; migrating along the regularization only", code=err.code)
        fallback = err.code
        probe = ProbeMatrix.from_matrix(np.zeros_like(hp.R))
        frequencies = []

    weight = PROBE_REGULARIZATION * frobenius(probe.M) if probe.rank else scale
    direction = _regularization_direction(p, np.random.default_rng(search.seed))
    probe = probe.augmented(weight * direction)
    span = max(frequencies) - min(frequencies) if frequencies else 0.0
    context = {"strategy": DeltaGStrategy.MIGRATION.value, "probe_fallback": fallback}
    try:
        trace = trace_eigenvalues(
            hp,
            probe,
            t_max=MIGRATION_HORIZON * (span or scale),
            steps=search.migration_steps,
            axis_tol=axis_tol,
        )
    except AnalysisError as err:
        error_msg = f"Migration homotopy could not be traced: {err.message}"
        raise SearchExhaustedError(error_msg, {**context, "code": err.code}) from err

    for t in trace.t_grid[1:]:
        try:
            delta_g = migration_delta_g(p, probe.scaled(t, trace.freeze_times), tol)
        except (AnalysisError, np.linalg.LinAlgError) as err:
            logger.debug("Migration step rejected", t=t, error=str(err))
            continue
        found = _candidate(accept, delta_g, search)
        if found is not None:
            frozen = sum(1 for tau in trace.freeze_times if tau <= t)
            logger.info(
                "Migration Delta G found",
                t=t,
                frozen=frozen,
                evaluations=accept.evaluations,
            )
            return DeltaGResult(
                found,
                True,
                accept.evaluations,
                DeltaGStrategy.MIGRATION,
                homotopy_t=t,
                frozen_generators=frozen,
                probe_fallback=fallback,
            )

    error_msg = f"Migration found no acceptable Delta G within {len(trace.t_grid)} steps"
    raise SearchExhaustedError(
        error_msg, {**context, "evaluations": accept.evaluations, "truncated": trace.truncated}
    )


def _user(
    p: RiccatiProblem, delta_g: ArrayLike | None, tol: float, axis_tol: float
) -> DeltaGResult:
    if delta_g is None:
        error_msg = "Strategy 'user' needs a Delta G matrix"
        raise ValueError(error_msg)
    dg = as_complex_matrix(delta_g, "delta_g")
    check_hermitian(dg, tol, "delta_g")
    dg = hermitian_part(dg)
    smallest = min_eigenvalue(dg, tol)
    if smallest <= tol * frobenius(dg):
        error_msg = f"delta_g must be positive definite (smallest eigenvalue {smallest:.3e})"
        raise NotPositiveDefiniteError(error_msg, {"name": "delta_g", "min_eigenvalue": smallest})

    report = spectrum(build_hamiltonian(p.with_g(p.G + dg)), axis_tol)
    if not report.axis_free:
        logger.warning(
            "User Delta G leaves axis eigenvalues", frequencies=report.axis_frequencies()
        )
    return DeltaGResult(dg, report.axis_free, 1, DeltaGStrategy.USER)


def find_delta_g(
    p: RiccatiProblem,
    strategy: DeltaGStrategy | str = DeltaGStrategy.AUTO,
    tol: float = DEFAULT_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    search: SearchConfig | None = None,
    user_delta_g: ArrayLike | None = None,
    known_verdict: SolvabilityVerdict | None = None,
) -> DeltaGResult:
    """Find a positive definite Delta G whose ``R_new`` has no axis eigenvalues.

    Args:
        p: Problem
        strategy: auto, scaled-identity, migration or user
        tol: Linear algebra tolerance
        axis_tol: Relative band for the imaginary axis
        rank_tol: Rank threshold for the classification (migration)
        search: Search budgets
        user_delta_g: Matrix checked by the ``user`` strategy
        known_verdict: Verdict already computed for ``p``

    Returns:
        DeltaGResult

    Raises:
        NotSolvableError: If the verdict says the inequality has no solution
        SearchExhaustedError: If the strategy fails within its budget
    """
    strategy = DeltaGStrategy(strategy)
    search = search or SearchConfig()
    result = known_verdict or verdict(build_hamiltonian(p), axis_tol, rank_tol)
    if result.solvable is False:
        error_msg = f"Inequality is not solvable: s(omega) < 0 at omega={result.witness:.6g}"
        raise NotSolvableError(error_msg, {"witness": result.witness, "s_values": result.s_values})
    if result.indeterminate:
        logger.warning("Verdict indeterminate; searching anyway", reason=result.reason)

    if strategy is DeltaGStrategy.USER:
        return _user(p, user_delta_g, tol, axis_tol)
    if strategy is DeltaGStrategy.SCALED_IDENTITY:
        return _scaled_identity(p, search, tol, axis_tol)
    if strategy is DeltaGStrategy.MIGRATION:
        return _migration(p, search, tol, axis_tol, rank_tol)

    try:
        return _scaled_identity(p, search, tol, axis_tol)
    except SearchExhaustedError as err:
        logger.warning("Scaled identity search failed; trying migration", error=err.message)
        return _migration(p, search, tol, axis_tol, rank_tol)
