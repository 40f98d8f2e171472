#!/usr/bin/env python3
"""Riccati inequality analyzer - Runner Script.

Entry point for the analysis commands. Run from the project root with:
python run.py [command] PROBLEM.json [options]

Reports go to standard output (or --output); progress and log messages go to
standard error.
"""

import sys
from pathlib import Path
from typing import Any

import structlog
import typer
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

# Add src directory to path
src_dir = Path(__file__).resolve().parent / "src"
sys.path.insert(0, str(src_dir))

from src.cli.commands import EXIT_OK, Command, RunConfig, run  # noqa: E402
from src.riccati.delta_g import DeltaGStrategy  # noqa: E402
from src.riccati.solver import SolutionMode  # noqa: E402
from src.utils.config import get_config  # noqa: E402
from src.utils.logging import configure_logging  # noqa: E402

# Initialize logger
logger = structlog.get_logger(__name__)
console = Console(stderr=True)

# Create Typer app
app = typer.Typer(
    help="Riccati inequality analyzer. "
    "Solvability verdicts, Krein classification, Riccati solutions and eigenvalue tracing."
)


# Global state
class State:
    config: Any = None
    log_level: str = "WARNING"
    config_dir: str = "config"


state = State()


@app.callback()
def main(
    log_level: str | None = typer.Option(None, help="Override logging level"),
    config_dir: str = typer.Option("config", help="Configuration directory"),
):
    """Riccati inequality analyzer.

    Decide solvability of HA + A*H + G - H B Gamma^-1 B* H < 0 and compute certified solutions.
    """
    # Load configuration
    config = get_config(Path(config_dir))
    state.config = config

    # Configure logging
    state.log_level = log_level or config.logging.level
    configure_logging(
        log_level=state.log_level,
        json_logs=config.logging.json_format,
        log_file=config.logging.file,
    )

    # Store context for subcommands
    state.config_dir = config_dir


# Define options outside of function calls
PROBLEM_ARGUMENT = typer.Argument(..., exists=True, dir_okay=False, help="Problem JSON file")
OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Write the report to this file")
TOL_OPTION = typer.Option(None, help="Linear algebra tolerance (overrides configuration)")
AXIS_TOL_OPTION = typer.Option(None, help="Relative imaginary-axis band (overrides configuration)")
RANK_TOL_OPTION = typer.Option(None, help="Relative rank threshold (overrides configuration)")
MODE_OPTION = typer.Option(SolutionMode.STABILIZING, help="Which solution to compute")
STRATEGY_OPTION = typer.Option(DeltaGStrategy.AUTO, help="Delta G search strategy")
T_MAX_OPTION = typer.Option(None, help="Final value of t (overrides configuration)")
STEPS_OPTION = typer.Option(None, help="Number of t grid points (overrides configuration)")
DELTA_OPTION = typer.Option(None, help="Probe generator length (overrides configuration)")
OMEGA_MAX_OPTION = typer.Option(None, help="Largest grid frequency (default 10*||A||+1)")
GRID_POINTS_OPTION = typer.Option(None, help="Number of grid frequencies")


def _dispatch(command: Command, problem: Path, output: Path | None, **overrides: Any) -> None:
    """Build the run configuration from configuration defaults and flags, then run."""
    config = state.config
    values = {key: value for key, value in overrides.items() if value is not None}
    cfg = RunConfig(
        command=command,
        input_path=problem,
        output_path=output,
        tol=values.pop("tol", config.tolerances.linalg),
        axis_tol=values.pop("axis_tol", config.tolerances.axis),
        rank_tol=values.pop("rank_tol", config.tolerances.rank),
        t_max=values.pop("t_max", config.trace.t_max),
        steps=values.pop("steps", config.trace.steps),
        delta=values.pop("delta", config.trace.delta),
        max_halvings=config.trace.max_halvings,
        omega_max=values.pop("omega_max", config.grid.omega_max),
        grid_points=values.pop("grid_points", config.grid.points),
        search=config.search,
        **values,
    )
    logger.info("Running command", command=command.value, problem=str(problem))

    with Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(f"[green]Running {command.value}...", total=None)
        status = run(cfg)
        progress.update(task, completed=True)

    if output is not None and status == EXIT_OK:
        console.print(f"[bold green]Report written to {output}[/bold green]")
    if status != EXIT_OK:
        raise typer.Exit(code=status)


@app.command("spectrum")
def spectrum_command(
    problem: Path = PROBLEM_ARGUMENT,
    axis_tol: float | None = AXIS_TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Eigenvalues of the Hamiltonian, mirror pairing and axis groups."""
    _dispatch(Command.SPECTRUM, problem, output, axis_tol=axis_tol)


@app.command("classify")
def classify_command(
    problem: Path = PROBLEM_ARGUMENT,
    axis_tol: float | None = AXIS_TOL_OPTION,
    rank_tol: float | None = RANK_TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Jordan blocks, indices and types of the imaginary eigenvalues."""
    _dispatch(Command.CLASSIFY, problem, output, axis_tol=axis_tol, rank_tol=rank_tol)


@app.command("check")
def check_command(
    problem: Path = PROBLEM_ARGUMENT,
    tol: float | None = TOL_OPTION,
    axis_tol: float | None = AXIS_TOL_OPTION,
    rank_tol: float | None = RANK_TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Solvability verdict; exits with status 2 when the inequality has no solution."""
    _dispatch(
        Command.CHECK, problem, output, tol=tol, axis_tol=axis_tol, rank_tol=rank_tol
    )


@app.command("solve")
def solve_command(
    problem: Path = PROBLEM_ARGUMENT,
    mode: SolutionMode = MODE_OPTION,
    strategy: DeltaGStrategy = STRATEGY_OPTION,
    tol: float | None = TOL_OPTION,
    axis_tol: float | None = AXIS_TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Certified stabilizing or anti-stabilizing solution of the inequality."""
    _dispatch(
        Command.SOLVE,
        problem,
        output,
        mode=mode,
        strategy=strategy,
        tol=tol,
        axis_tol=axis_tol,
    )


@app.command("trace")
def trace_command(
    problem: Path = PROBLEM_ARGUMENT,
    t_max: float | None = T_MAX_OPTION,
    steps: int | None = STEPS_OPTION,
    delta: float | None = DELTA_OPTION,
    axis_tol: float | None = AXIS_TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Eigenvalue trajectories of R - tMJ as CSV."""
    _dispatch(
        Command.TRACE,
        problem,
        output,
        t_max=t_max,
        steps=steps,
        delta=delta,
        axis_tol=axis_tol,
    )


@app.command("ky")
def ky_command(
    problem: Path = PROBLEM_ARGUMENT,
    omega_max: float | None = OMEGA_MAX_OPTION,
    grid_points: int | None = GRID_POINTS_OPTION,
    tol: float | None = TOL_OPTION,
    output: Path | None = OUTPUT_OPTION,
):
    """Frequency-grid diagnostic of det pi(i omega)."""
    _dispatch(
        Command.KY,
        problem,
        output,
        omega_max=omega_max,
        grid_points=grid_points,
        tol=tol,
    )


if __name__ == "__main__":
    app()
