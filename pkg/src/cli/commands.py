"""Command dispatch behind ``run.py``.

Each command loads a problem file, runs one pipeline and writes a JSON report
(CSV for ``trace``) to the output file or the given stream. Exit status is 0 on
success, 2 when the analysis answers "not solvable" and 1 on any error; errors
are written as ``{code, message, context}`` JSON objects.
"""

import sys
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, TextIO

import structlog
from structlog.contextvars import bind_contextvars, clear_contextvars

from src.hamiltonian.structure import DEFAULT_AXIS_TOL, build_hamiltonian, spectrum
from src.krein.classification import DEFAULT_RANK_TOL, classify_blocks, verdict
from src.linalg.decompositions import DEFAULT_TOL
from src.migration.perturbation import construct_probe
from src.migration.trace import trace_eigenvalues
from src.problem.frequency import DEFAULT_GRID_POINTS, ky_grid_check
from src.problem.io import LoadedProblem, load_problem
from src.problem.model import validate
from src.riccati.delta_g import DeltaGStrategy
from src.riccati.inequality import solve_inequality
from src.riccati.solver import SolutionMode
from src.utils.config import SearchConfig
from src.utils.exceptions import AnalysisError, NotSolvableError
from src.utils.serialization import dumps_report, frame_to_csv, write_report

# Initialize logger
logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SOLVABLE = 2


class Command(StrEnum):
    SPECTRUM = "spectrum"
    CLASSIFY = "classify"
    CHECK = "check"
    SOLVE = "solve"
    TRACE = "trace"
    KY = "ky"


@dataclass(frozen=True)
class RunConfig:
    """Arguments of one CLI invocation."""

    command: Command
    input_path: Path
    tol: float = DEFAULT_TOL
    mode: SolutionMode = SolutionMode.STABILIZING
    t_max: float = 1.0
    steps: int = 200
    omega_max: float | None = None
    grid_points: int = DEFAULT_GRID_POINTS
    output_path: Path | None = None
    axis_tol: float = DEFAULT_AXIS_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    strategy: DeltaGStrategy = DeltaGStrategy.AUTO
    delta: float = 1.0
    max_halvings: int = 6
    search: SearchConfig = field(default_factory=SearchConfig)

    def check(self) -> None:
        """Raise ValueError when a numeric flag is out of range."""
        positive = {
            "tol": self.tol,
            "t_max": self.t_max,
            "axis_tol": self.axis_tol,
            "rank_tol": self.rank_tol,
            "delta": self.delta,
        }
        if self.omega_max is not None:
            positive["omega_max"] = self.omega_max
        for name, value in positive.items():
            if not value > 0:
                error_msg = f"--{name.replace('_', '-')} must be positive, got {value}"
                raise ValueError(error_msg)
        if self.steps < 2:
            error_msg = f"--steps must be at least 2, got {self.steps}"
            raise ValueError(error_msg)
        if self.grid_points < 2:
            error_msg = f"--grid-points must be at least 2, got {self.grid_points}"
            raise ValueError(error_msg)


def _spectrum(cfg: RunConfig, loaded: LoadedProblem) -> tuple[Any, int]:
    return spectrum(build_hamiltonian(loaded.problem), cfg.axis_tol), EXIT_OK


def _classify(cfg: RunConfig, loaded: LoadedProblem) -> tuple[Any, int]:
    hp = build_hamiltonian(loaded.problem)
    return classify_blocks(hp, rank_tol=cfg.rank_tol, axis_tol=cfg.axis_tol), EXIT_OK


def _check(cfg: RunConfig, loaded: LoadedProblem) -> tuple[Any, int]:
    validate(loaded.problem, cfg.tol)
    result = verdict(build_hamiltonian(loaded.problem), cfg.axis_tol, cfg.rank_tol)
    return result, EXIT_NOT_SOLVABLE if result.solvable is False else EXIT_OK


def _solve(cfg: RunConfig, loaded: LoadedProblem) -> tuple[Any, int]:
    strategy = cfg.strategy
    if strategy is DeltaGStrategy.AUTO and loaded.delta_g is not None:
        # A Delta G shipped with the problem file takes precedence.
        strategy = DeltaGStrategy.USER
    certificate = solve_inequality(
        loaded.problem,
        cfg.mode,
        tol=cfg.tol,
        axis_tol=cfg.axis_tol,
        rank_tol=cfg.rank_tol,
        strategy=strategy,
        delta_g=loaded.delta_g,
        search=cfg.search,
    )
    return certificate, EXIT_OK


def _ky(cfg: RunConfig, loaded: LoadedProblem) -> tuple[Any, int]:
    report = ky_grid_check(loaded.problem, cfg.omega_max, cfg.grid_points, cfg.tol)
    return report, EXIT_OK


def _trace(cfg: RunConfig, loaded: LoadedProblem) -> str:
    hp = build_hamiltonian(loaded.problem)
    classification = classify_blocks(hp, rank_tol=cfg.rank_tol, axis_tol=cfg.axis_tol)
    probe = construct_probe(hp, classification, delta=cfg.delta)
    result = trace_eigenvalues(
        hp,
        probe,
        t_max=cfg.t_max,
        steps=cfg.steps,
        axis_tol=cfg.axis_tol,
        max_halvings=cfg.max_halvings,
    )
    if result.truncated:
        logger.warning("Trace truncated", diagnostic=result.diagnostic)
    return frame_to_csv(result.to_frame(), cfg.output_path)


REPORTS = {
    Command.SPECTRUM: _spectrum,
    Command.CLASSIFY: _classify,
    Command.CHECK: _check,
    Command.SOLVE: _solve,
    Command.KY: _ky,
}


def _error_payload(err: Exception) -> dict[str, Any]:
    if isinstance(err, AnalysisError):
        return err.to_payload()
    return {"code": "invalid_arguments", "message": str(err), "context": {}}


def run(cfg: RunConfig, stream: TextIO | None = None) -> int:
    """Execute one command.

    Args:
        cfg: Invocation arguments
        stream: Where reports and errors go when no output file is set
            (standard output by default)

    Returns:
        Exit status
    """
    stream = stream or sys.stdout
    command = Command(cfg.command)
    bind_contextvars(command=command.value, problem=cfg.input_path.name)
    try:
        cfg.check()
        loaded = load_problem(cfg.input_path)
        if command is Command.TRACE:
            text = _trace(cfg, loaded)
            status = EXIT_OK
        else:
            report, status = REPORTS[command](cfg, loaded)
            text = write_report(report, cfg.output_path)
    except NotSolvableError as err:
        logger.info("Not solvable", witness=err.context.get("witness"))
        text = write_report(err.to_payload(), cfg.output_path)
        if cfg.output_path is None:
            stream.write(text)
        return EXIT_NOT_SOLVABLE
    except (AnalysisError, ValueError) as err:
        logger.error("Command failed", error=str(err))
        stream.write(dumps_report(_error_payload(err)))
        return EXIT_ERROR
    finally:
        clear_contextvars()

    if cfg.output_path is None:
        stream.write(text)
    logger.info("Command finished", command=command.value, status=status)
    return status
