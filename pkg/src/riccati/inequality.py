"""End-to-end solver for the strict Riccati inequality."""

from dataclasses import replace

import numpy as np
import structlog
from numpy.typing import ArrayLike

from src.hamiltonian.structure import DEFAULT_AXIS_TOL, build_hamiltonian
from src.krein.classification import DEFAULT_RANK_TOL, verdict
from src.linalg.decompositions import DEFAULT_TOL
from src.problem.model import RiccatiProblem, validate
from src.riccati.delta_g import DeltaGStrategy, find_delta_g
from src.riccati.solver import SolutionCertificate, SolutionMode, solve_are
from src.utils.config import SearchConfig
from src.utils.exceptions import (
    AxisEigenvalueError,
    ClosedLoopError,
    NotSolvableError,
    SearchExhaustedError,
    SingularX1Error,
)

# Initialize logger
logger = structlog.get_logger(__name__)

ESCALATION_FACTOR = 10.0


def solve_inequality(
    p: RiccatiProblem,
    mode: SolutionMode | str = SolutionMode.STABILIZING,
    tol: float = DEFAULT_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    strategy: DeltaGStrategy | str = DeltaGStrategy.AUTO,
    delta_g: ArrayLike | None = None,
    search: SearchConfig | None = None,
) -> SolutionCertificate:
    """Solve ``HA + A^*H + G - HQH < 0`` with a certified H.

    Runs the verdict, finds Delta G, solves the Riccati equation of the
    perturbed problem and measures the margin against the original G. While
    the margin is not certified Delta G is scaled up by a factor of ten.

    Args:
        p: Problem
        mode: Stabilizing or anti-stabilizing solution
        tol: Linear algebra tolerance
        axis_tol: Relative band for the imaginary axis
        rank_tol: Rank threshold for the classification
        strategy: Delta G search strategy
        delta_g: Matrix for the ``user`` strategy
        search: Search budgets

    Returns:
        SolutionCertificate with ``delta_g`` and ``strategy`` filled in

    Raises:
        NotSolvableError: If the verdict rules out any solution
        SearchExhaustedError: If no certified solution was found
    """
    mode = SolutionMode(mode)
    search = search or SearchConfig()
    validate(p, tol)

    result = verdict(build_hamiltonian(p), axis_tol, rank_tol)
    if result.solvable is False:
        error_msg = f"Inequality is not solvable: s(omega) < 0 at omega={result.witness:.6g}"
        raise NotSolvableError(error_msg, {"witness": result.witness, "s_values": result.s_values})

    found = find_delta_g(
        p,
        strategy,
        tol=tol,
        axis_tol=axis_tol,
        rank_tol=rank_tol,
        search=search,
        user_delta_g=delta_g,
        known_verdict=result,
    )

    dg = found.delta_g
    last_error: str | None = None
    for step in range(search.escalation_steps + 1):
        try:
            certificate = solve_are(p.with_g(p.G + dg), mode, tol, original=p)
        except (SingularX1Error, ClosedLoopError, AxisEigenvalueError) as err:
            last_error = f"{err.code}: {err.message}"
            logger.debug("Perturbed equation rejected", step=step, error=last_error)
        else:
            if certificate.inequality_satisfied:
                logger.info(
                    "Inequality solved",
                    mode=mode.value,
                    strategy=found.strategy.value,
                    margin=certificate.inequality_margin,
                    escalations=step,
                )
                return replace(certificate, delta_g=dg, strategy=found.strategy.value)
            last_error = f"margin {certificate.inequality_margin:.3e} not certified"
            logger.debug("Margin not certified", step=step, margin=certificate.inequality_margin)
        dg = ESCALATION_FACTOR * dg

    error_msg = f"No certified {mode.value} solution after {search.escalation_steps} escalations"
    raise SearchExhaustedError(
        error_msg,
        {
            "strategy": found.strategy.value,
            "last_error": last_error,
            "delta_g_norm": float(np.linalg.norm(dg)),
        },
    )
