"""Eigenvalue trajectories of ``R - t M J``.

The spectrum is recomputed on a grid of t values and matched step to step by
a minimum-cost assignment. Each step records which eigenvalues sit on the
imaginary axis and their type ``sign(v^* (iJ) v)``. When two axis eigenvalues
of opposite type meet, the generators of M belonging to them stop growing
(their contribution is frozen at the meeting time) so that the pair stays put
while the rest of M keeps acting.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import polars as pl
import scipy.linalg
import structlog
from scipy.optimize import linear_sum_assignment

from src.hamiltonian.structure import (
    CLUSTER_FACTOR,
    DEFAULT_AXIS_TOL,
    HamiltonianPair,
    spectrum,
)
from src.linalg.decompositions import ComplexMatrix, frobenius
from src.migration.perturbation import ProbeMatrix
from src.utils.exceptions import MatchingAmbiguityError

# Initialize logger
logger = structlog.get_logger(__name__)

CONTINUATION_FACTOR = 3.0
NEUTRAL_FORM_TOL = 1e-6


class EventKind(StrEnum):
    LEFT_AXIS = "left_axis"
    MET_OPPOSITE_TYPE = "met_opposite_type"
    FROZEN = "frozen"


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: EventKind
    frequencies: list[float]
    trajectories: list[int] = field(default_factory=list)
    generators: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class TraceResult:
    """Matched eigenvalue paths; row i of each array belongs to ``t_grid[i]``."""

    t_grid: list[float]
    trajectories: ComplexMatrix
    on_axis_mask: np.ndarray
    types: np.ndarray
    events: list[TraceEvent]
    diagnostic: dict[str, Any] | None = None
    freeze_times: list[float] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return self.diagnostic is not None

    def events_of(self, kind: EventKind) -> list[TraceEvent]:
        return [event for event in self.events if event.kind is kind]

    def starting_near(self, omega: float, radius: float) -> list[int]:
        """Trajectories whose initial value lies within radius of ``i omega``."""
        start = self.trajectories[0]
        return [i for i, value in enumerate(start) if abs(value - 1j * omega) <= radius]

    def to_frame(self) -> pl.DataFrame:
        steps, size = self.trajectories.shape
        return pl.DataFrame(
            {
                "t": np.repeat(np.asarray(self.t_grid, dtype=float), size),
                "eig_index": np.tile(np.arange(size), steps),
                "re": self.trajectories.real.reshape(-1),
                "im": self.trajectories.imag.reshape(-1),
                "on_axis": self.on_axis_mask.reshape(-1),
            }
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "t_grid": self.t_grid,
            "events": self.events,
            "freeze_times": self.freeze_times,
            "diagnostic": self.diagnostic,
        }


def _eig(r: ComplexMatrix) -> tuple[np.ndarray, ComplexMatrix]:
    values, vectors = scipy.linalg.eig(r)
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    return values, vectors


def _forms(vectors: ComplexMatrix, j: ComplexMatrix) -> np.ndarray:
    """Values ``v^* (iJ) v`` for unit columns v."""
    return np.real(np.einsum("ij,ik,kj->j", vectors.conj(), 1j * j, vectors))


class _Tracer:
    """Stateful helper for one tracing run."""

    def __init__(self, hp: HamiltonianPair, probe: ProbeMatrix, axis_tol: float) -> None:
        self.hp = hp
        self.probe = probe
        self.scale = hp.norm if hp.norm > 0 else 1.0
        self.band = axis_tol * self.scale
        self.meet_radius = CLUSTER_FACTOR * self.band
        self.freeze_times = [np.inf] * probe.rank
        groups = spectrum(hp, axis_tol).axis_groups
        self.order = max([g.algebraic_multiplicity for g in groups], default=1)

    def matrix_at(self, t: float) -> ComplexMatrix:
        return self.hp.R - self.probe.scaled(t, self.freeze_times) @ self.hp.J

    def radius(self, t_old: float, t_new: float) -> float:
        displacement = frobenius(self.matrix_at(t_new) - self.matrix_at(t_old))
        if displacement == 0.0:
            return self.meet_radius
        spread = self.scale * (displacement / self.scale) ** (1.0 / self.order)
        return CONTINUATION_FACTOR * spread + self.meet_radius

    def generators_for(self, omegas: list[float]) -> list[int]:
        hits = [
            k
            for k, omega_k in enumerate(self.probe.generator_omegas)
            if omega_k is not None
            and self.freeze_times[k] == np.inf
            and any(abs(omega_k - omega) <= self.meet_radius for omega in omegas)
        ]
        if hits:
            return hits
        return [k for k in range(self.probe.rank) if self.freeze_times[k] == np.inf]


def trace_eigenvalues(
    hp: HamiltonianPair,
    probe: ProbeMatrix,
    t_max: float = 1.0,
    steps: int = 200,
    axis_tol: float = DEFAULT_AXIS_TOL,
    max_halvings: int = 6,
) -> TraceResult:
    """Follow the spectrum of ``R - t M J`` for t in ``[0, t_max]``.

    Args:
        hp: Hamiltonian pair
        probe: Probe matrix M with its generators
        t_max: Final value of t
        steps: Number of grid points (at least 2)
        axis_tol: Relative band for the imaginary axis
        max_halvings: Step halvings allowed when matching fails

    Returns:
        TraceResult; when matching cannot be resolved the result is truncated
        and ``diagnostic`` holds the error payload
    """
    if steps < 2:
        error_msg = f"steps must be at least 2, got {steps}"
        raise ValueError(error_msg)
    if t_max <= 0:
        error_msg = f"t_max must be positive, got {t_max}"
        raise ValueError(error_msg)

    tracer = _Tracer(hp, probe, axis_tol)
    values, vectors = _eig(tracer.matrix_at(0.0))
    forms = _forms(vectors, hp.J)
    on_axis = np.abs(values.real) <= tracer.band
    typed = on_axis & (np.abs(forms) > NEUTRAL_FORM_TOL)
    last_type = np.where(typed, np.sign(forms), 0).astype(int)
    met = np.zeros(values.size, dtype=bool)

    t_values = [0.0]
    paths = [values.copy()]
    masks = [on_axis.copy()]
    types = [last_type.copy()]
    events: list[TraceEvent] = []
    diagnostic: dict[str, Any] | None = None

    t_prev = 0.0
    for target in np.linspace(0.0, t_max, steps)[1:]:
        while t_prev < target and diagnostic is None:
            dt = target - t_prev
            for halvings in range(max_halvings + 1):
                t_new = target if dt >= target - t_prev else t_prev + dt
                new_values, new_vectors = _eig(tracer.matrix_at(t_new))
                cost = np.abs(values[:, None] - new_values[None, :])
                rows, cols = linear_sum_assignment(cost)
                distance = cost[rows, cols]
                radius = tracer.radius(t_prev, t_new)
                if np.max(distance, initial=0.0) <= radius:
                    break
                logger.debug("Halving trace step", t=t_prev, dt=dt, halvings=halvings + 1)
                dt /= 2
            else:
                err = MatchingAmbiguityError(
                    f"Eigenvalue matching failed after {max_halvings} halvings at t={t_prev:.6g}",
                    {"t": t_prev, "radius": radius, "distance": float(np.max(distance))},
                )
                logger.warning("Trace truncated", **err.to_payload())
                diagnostic = err.to_payload()
                break

            previous = values
            values = new_values[cols]
            vectors = new_vectors[:, cols]
            forms = _forms(vectors, hp.J)
            was_on = on_axis
            on_axis = np.abs(values.real) <= tracer.band
            typed = on_axis & (np.abs(forms) > NEUTRAL_FORM_TOL)
            last_type = np.where(typed, np.sign(forms), last_type).astype(int)

            events.extend(
                TraceEvent(
                    t=t_new,
                    kind=EventKind.LEFT_AXIS,
                    frequencies=[float(previous[i].imag)],
                    trajectories=[int(i)],
                )
                for i in np.flatnonzero(was_on & ~on_axis)
            )
            for a, b in _meetings(previous, values, was_on, on_axis, last_type, met, tracer):
                met[[a, b]] = True
                frequencies = [float(paths[0][a].imag), float(paths[0][b].imag)]
                events.append(
                    TraceEvent(
                        t=t_new,
                        kind=EventKind.MET_OPPOSITE_TYPE,
                        frequencies=[float(values[a].imag), float(values[b].imag)],
                        trajectories=[a, b],
                    )
                )
                frozen = tracer.generators_for(frequencies)
                for k in frozen:
                    tracer.freeze_times[k] = t_new
                if frozen:
                    events.append(
                        TraceEvent(
                            t=t_new,
                            kind=EventKind.FROZEN,
                            frequencies=frequencies,
                            trajectories=[a, b],
                            generators=frozen,
                        )
                    )

            t_prev = t_new
            t_values.append(t_new)
            paths.append(values.copy())
            masks.append(on_axis.copy())
            types.append(np.where(on_axis, last_type, 0).astype(int))
        if diagnostic is not None:
            break

    logger.info(
        "Traced eigenvalues",
        steps=len(t_values),
        events=len(events),
        truncated=diagnostic is not None,
    )
    return TraceResult(
        t_grid=t_values,
        trajectories=np.array(paths),
        on_axis_mask=np.array(masks),
        types=np.array(types),
        events=events,
        diagnostic=diagnostic,
        freeze_times=list(tracer.freeze_times),
    )


def _meetings(
    previous: np.ndarray,
    current: np.ndarray,
    was_on: np.ndarray,
    on_axis: np.ndarray,
    last_type: np.ndarray,
    met: np.ndarray,
    tracer: _Tracer,
) -> list[tuple[int, int]]:
    """Pairs of opposite-type axis trajectories that came together in this step."""
    pairs: list[tuple[int, int]] = []
    candidates = [i for i in np.flatnonzero(was_on & ~met) if last_type[i] != 0]
    used: set[int] = set()
    for position, a in enumerate(candidates):
        for b in candidates[position + 1 :]:
            if a in used or b in used or last_type[a] == last_type[b]:
                continue
            apart_before = abs(previous[a] - previous[b]) > tracer.meet_radius
            both_on = on_axis[a] and on_axis[b]
            together = both_on and abs(current[a] - current[b]) <= tracer.meet_radius
            mirrored = (
                not on_axis[a]
                and not on_axis[b]
                and abs(current[a] + np.conj(current[b])) <= tracer.meet_radius
            )
            if apart_before and (together or mirrored):
                pairs.append((int(a), int(b)))
                used.update((int(a), int(b)))
    return pairs
