"""Tableau-driven explicit steppers and Richardson extrapolation.

There is a single execution path: every scheme, projective or not, is run
through the same stage loop. The stage slopes are kept in the result so
stage-wise estimator formulas can be checked against the generic weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .tableau import EmbeddedTableau, ParameterError, PartitionedTableau, Tableau

__all__ = [
    "InstabilityError",
    "OdeSystem",
    "StepResult",
    "PartitionedState",
    "Trajectory",
    "rk_step",
    "embedded_step",
    "partitioned_step",
    "integrate",
    "richardson_correct",
    "richardson_estimate",
    "write_trajectory_csv",
]


class InstabilityError(ArithmeticError):
    """A stage value or update became non-finite.

    Raised on purpose: for explicit schemes this signals that the step is
    outside the stability region.
    """

    def __init__(self, stage: int | None, step: int | None = None, msg: str = ""):
        self.stage = stage
        self.step = step
        where = []
        if step is not None:
            where.append(f"step {step}")
        if stage is not None:
            where.append(f"stage {stage}" if stage >= 0 else "update")
        super().__init__(msg or "non-finite state at " + ", ".join(where))


@dataclass(frozen=True)
class OdeSystem:
    """Autonomous system ``u' = f(u)``."""

    n: int
    f: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[float], np.ndarray]] = None
    stiffness_eps: Optional[float] = None
    name: str = "ode"

    def initial(self) -> np.ndarray:
        if self.exact is None:
            raise ParameterError(f"{self.name}: no exact solution to take the initial state from")
        return np.asarray(self.exact(0.0), dtype=float)


@dataclass(frozen=True)
class StepResult:
    u_next: np.ndarray
    stage_slopes: tuple[np.ndarray, ...]
    error_estimate: Optional[np.ndarray] = None

    @property
    def u_low(self) -> np.ndarray:
        """Low-order solution of an embedded step."""
        if self.error_estimate is None:
            raise AttributeError("step was not embedded")
        return self.u_next - self.error_estimate


@dataclass(frozen=True)
class PartitionedState:
    u_L: np.ndarray
    u_R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_L", np.atleast_1d(np.asarray(self.u_L, dtype=float)))
        object.__setattr__(self, "u_R", np.atleast_1d(np.asarray(self.u_R, dtype=float)))

    @classmethod
    def split(cls, u: np.ndarray, left_idx: Sequence[int]) -> "PartitionedState":
        u = np.asarray(u, dtype=float)
        mask = np.zeros(u.shape[0], dtype=bool)
        mask[list(left_idx)] = True
        return cls(u[mask], u[~mask])


def _check(x: np.ndarray, stage: int) -> None:
    if not np.all(np.isfinite(x)):
        raise InstabilityError(stage)


def _stages(t: Tableau, f, u: np.ndarray, dt: float) -> list[np.ndarray]:
    A = t.A_arr
    k: list[np.ndarray] = []
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(t.s):
            y = u.copy()
            for j in range(i):
                if A[i, j] != 0.0:
                    y += (dt * A[i, j]) * k[j]
            _check(y, i)
            ki = np.asarray(f(y), dtype=float)
            _check(ki, i)
            k.append(ki)
    return k


def _combine(u: np.ndarray, dt: float, w: np.ndarray, k: Sequence[np.ndarray]) -> np.ndarray:
    out = u.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for wj, kj in zip(w, k):
            if wj != 0.0:
                out += (dt * wj) * kj
    _check(out, -1)
    return out


def _prepare(u, dt) -> np.ndarray:
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive and finite, got {dt!r}")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if not np.all(np.isfinite(u)):
        raise ParameterError("initial state must be finite")
    return u


def rk_step(t: Tableau | EmbeddedTableau, sys: OdeSystem, u, dt: float) -> StepResult:
    """One explicit RK step: exactly ``t.s`` evaluations of ``sys.f``."""
    if isinstance(t, EmbeddedTableau):
        t = t.base
    u = _prepare(u, dt)
    k = _stages(t, sys.f, u, dt)
    return StepResult(_combine(u, dt, t.b_arr, k), tuple(k))


def embedded_step(t: EmbeddedTableau, sys: OdeSystem, u, dt: float) -> StepResult:
    """Step with ``b`` and estimate ``dt * sum((b - b_tilde) k)`` from the same slopes."""
    if not isinstance(t, EmbeddedTableau):
        raise ParameterError(f"{t.name!r} is not an embedded tableau")
    u = _prepare(u, dt)
    k = _stages(t.base, sys.f, u, dt)
    u_next = _combine(u, dt, t.b_arr, k)
    est = _combine(np.zeros_like(u), dt, t.error_weights, k)
    return StepResult(u_next, tuple(k), est)


def partitioned_step(pt: PartitionedTableau, f_L, f_R, state: PartitionedState, dt: float) -> PartitionedState:
    """One partitioned RK step.

    ``f_L(u_L, u_R)`` and ``f_R(u_L, u_R)`` are evaluated at the same stage
    index; stage ``i`` of both parts is formed before either slope ``i`` is
    taken.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive and finite, got {dt!r}")
    AL, AR = pt.left.A_arr, pt.right.A_arr
    uL, uR = state.u_L, state.u_R
    kL: list[np.ndarray] = []
    kR: list[np.ndarray] = []
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(pt.s):
            yL, yR = uL.copy(), uR.copy()
            for j in range(i):
                if AL[i, j] != 0.0:
                    yL += (dt * AL[i, j]) * kL[j]
                if AR[i, j] != 0.0:
                    yR += (dt * AR[i, j]) * kR[j]
            _check(yL, i)
            _check(yR, i)
            kL.append(np.atleast_1d(np.asarray(f_L(yL, yR), dtype=float)))
            kR.append(np.atleast_1d(np.asarray(f_R(yL, yR), dtype=float)))
            _check(kL[-1], i)
            _check(kR[-1], i)
    return PartitionedState(_combine(uL, dt, pt.left.b_arr, kL), _combine(uR, dt, pt.right.b_arr, kR))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    estimates: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def step_count(dt: float, t_end: float) -> int:
    """Number of steps, requiring ``t_end / dt`` to be an integer to 1e-9 relative."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive and finite, got {dt!r}")
    if t_end < 0:
        raise ParameterError("t_end must be non-negative")
    ratio = t_end / dt
    N = round(ratio)
    if abs(ratio - N) > 1e-9 * max(1.0, ratio):
        raise ParameterError(f"t_end={t_end!r} is not an integer multiple of dt={dt!r}")
    return int(N)


def integrate(t: Tableau | EmbeddedTableau, sys: OdeSystem, u0, dt: float, t_end: float) -> Trajectory:
    """Take ``t_end / dt`` fixed steps; embedded tableaus also record estimates."""
    N = step_count(dt, t_end)
    u = _prepare(u0, dt)
    embedded = isinstance(t, EmbeddedTableau)
    states = np.empty((N + 1, u.size))
    states[0] = u
    ests = np.zeros((N + 1, u.size)) if embedded else None
    for n in range(N):
        try:
            res = embedded_step(t, sys, u, dt) if embedded else rk_step(t, sys, u, dt)
        except InstabilityError as exc:
            raise InstabilityError(exc.stage, n) from exc
        u = res.u_next
        states[n + 1] = u
        if embedded:
            ests[n + 1] = res.error_estimate
    times = np.arange(N + 1) * dt
    return Trajectory(times, states, ests, {"scheme": t.name, "dt": dt, "t_end": t_end})


def richardson_correct(u_full, u_half, p: int):
    """Combine one full step and two half steps of an order-``p`` method."""
    if p < 1:
        raise ParameterError("order p must be >= 1")
    q = 2.0**p
    return (q * np.asarray(u_half, dtype=float) - np.asarray(u_full, dtype=float)) / (q - 1)


def richardson_estimate(u_full, u_half, p: int):
    """Error of the full-step solution relative to the corrected one."""
    if p < 1:
        raise ParameterError("order p must be >= 1")
    q = 2.0**p
    return q * (np.asarray(u_full, dtype=float) - np.asarray(u_half, dtype=float)) / (q - 1)


def write_trajectory_csv(traj: Trajectory, path, precision: int = 17) -> None:
    n = traj.states.shape[1]
    cols = ["t"] + [f"u{i}" for i in range(n)]
    if traj.estimates is not None:
        cols += [f"est{i}" for i in range(n)]
    fmt = f"{{:.{precision}g}}"
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for i, ti in enumerate(traj.times):
            row = [ti, *traj.states[i]]
            if traj.estimates is not None:
                row += list(traj.estimates[i])
            fh.write(",".join(fmt.format(float(x)) for x in row) + "\n")
