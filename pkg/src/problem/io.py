"""Problem file parsing.

A problem file is a JSON object with ``n``, ``m`` and the matrices ``A``,
``B``, ``G``, ``Gamma`` as arrays of rows. Each entry is a real number or a
``[re, im]`` pair. ``form`` selects the reduction: ``standard`` (default),
``absolute_stability`` (``Gamma`` is then the positive definite weight) or
``hinf`` (``B_w``, ``B_u``, ``Gamma_w``, ``Gamma_u`` replace ``B`` and
``Gamma``). An optional ``delta_g`` matrix is carried for the user-supplied
Delta G strategy.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.linalg.decompositions import ComplexMatrix
from src.problem.model import RiccatiProblem, from_absolute_stability, from_hinf
from src.utils.exceptions import ParseError

# Initialize logger
logger = structlog.get_logger(__name__)

Entry = float | Annotated[list[float], Field(min_length=2, max_length=2)]
MatrixRows = list[list[Entry]]


def _to_matrix(rows: MatrixRows, cols: int | None = None) -> ComplexMatrix:
    if not rows:
        return np.zeros((0, cols or 0), dtype=np.complex128)
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        error_msg = "matrix rows have different lengths"
        raise ValueError(error_msg)
    return np.array(
        [[complex(e[0], e[1]) if isinstance(e, list) else complex(e) for e in row] for row in rows],
        dtype=np.complex128,
    )


class ProblemFile(BaseModel):
    """Schema of a problem file."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str | None = None
    form: Literal["standard", "absolute_stability", "hinf"] = "standard"
    n: int = Field(ge=1)
    m: int = Field(ge=0)
    A: MatrixRows
    G: MatrixRows
    B: MatrixRows | None = None
    Gamma: MatrixRows | None = None
    B_w: MatrixRows | None = None
    B_u: MatrixRows | None = None
    Gamma_w: MatrixRows | None = None
    Gamma_u: MatrixRows | None = None
    delta_g: MatrixRows | None = None

    @model_validator(mode="after")
    def _check_form_fields(self) -> "ProblemFile":
        if self.form == "hinf":
            missing = [k for k in ("B_w", "Gamma_w") if getattr(self, k) is None]
        else:
            missing = [k for k in ("B", "Gamma") if getattr(self, k) is None]
        if missing:
            error_msg = f"form '{self.form}' requires fields {missing}"
            raise ValueError(error_msg)
        return self


@dataclass(frozen=True)
class LoadedProblem:
    problem: RiccatiProblem
    delta_g: ComplexMatrix | None = None


def _build(parsed: ProblemFile) -> LoadedProblem:
    a = _to_matrix(parsed.A)
    g = _to_matrix(parsed.G)
    name = parsed.name or parsed.form

    if parsed.form == "hinf":
        b_w = _to_matrix(parsed.B_w or [])
        b_u = _to_matrix(parsed.B_u or [], 0)
        gamma_u = _to_matrix(parsed.Gamma_u or [], 0)
        problem = from_hinf(a, b_w, b_u, g, _to_matrix(parsed.Gamma_w or []), gamma_u)
    elif parsed.form == "absolute_stability":
        problem = from_absolute_stability(
            a, _to_matrix(parsed.B or []), g, _to_matrix(parsed.Gamma or [])
        )
    else:
        problem = RiccatiProblem(
            a, _to_matrix(parsed.B or [], parsed.m), g, _to_matrix(parsed.Gamma or [], parsed.m)
        )

    problem = RiccatiProblem(problem.A, problem.B, problem.G, problem.Gamma, name=name)
    if problem.n != parsed.n or problem.m != parsed.m:
        error_msg = (
            f"declared n={parsed.n}, m={parsed.m} but matrices give n={problem.n}, m={problem.m}"
        )
        raise ValueError(error_msg)

    delta_g = _to_matrix(parsed.delta_g) if parsed.delta_g is not None else None
    return LoadedProblem(problem=problem, delta_g=delta_g)


def parse_problem(text: str) -> LoadedProblem:
    """Parse problem JSON text.

    Raises:
        ParseError: If the JSON is malformed or the matrices are inconsistent
    """
    try:
        parsed = ProblemFile.model_validate_json(text)
        return _build(parsed)
    except ValidationError as err:
        error_msg = f"Invalid problem file: {err.error_count()} validation error(s)"
        raise ParseError(error_msg, {"errors": [e["msg"] for e in err.errors()]}) from err
    except ValueError as err:
        error_msg = f"Invalid problem file: {err}"
        raise ParseError(error_msg) from err


def load_problem(path: Path) -> LoadedProblem:
    """Read and parse a problem file."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        error_msg = f"Cannot read problem file: {path}"
        raise ParseError(error_msg, {"path": str(path)}) from err

    loaded = parse_problem(text)
    logger.info("Loaded problem", path=str(path), n=loaded.problem.n, m=loaded.problem.m)
    return loaded
