"""Test problems and the convergence / estimator / limit studies behind the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import schemes as sch
from .analysis import ConvergenceRecord, measured_order, prk_limit_deviation
from .integrator import InstabilityError, OdeSystem, embedded_step, integrate, rk_step
from .tableau import EmbeddedTableau, ParameterError, PartitionedTableau

__all__ = [
    "dahlquist",
    "model2",
    "model2_coupled",
    "linear_from_file",
    "parse_problem",
    "CONVERGENCE_MODES",
    "run_parameters",
    "convergence_study",
    "EstimatorStudyRow",
    "ESTIMATOR_SCHEMES",
    "estimator_study",
    "limit_check",
    "log_sweep",
    "slopes_by_record",
]


# -- problems -------------------------------------------------------------------


def dahlquist(rate: float = 1.0) -> OdeSystem:
    """``u' = -rate u``, ``u(0) = 1``."""
    return OdeSystem(1, lambda u: -rate * u, lambda t: np.array([math.exp(-rate * t)]),
                     name="dahlquist")


def model2(eps: float) -> OdeSystem:
    """Decoupled slow/fast pair ``u0' = -u0``, ``u1' = -u1/eps``, both starting at 1."""
    if not eps > 0:
        raise ParameterError("model2 needs eps > 0")
    inv = 1.0 / eps

    def f(u):
        return np.array([-u[0], -inv * u[1]])

    def exact(t):
        return np.array([math.exp(-t), math.exp(-t * inv)])

    return OdeSystem(2, f, exact, eps, name=f"model2:eps={eps!r}")


def model2_coupled(eps: float) -> OdeSystem:
    """Variant with ``u1' = -u0/eps`` (fast equation driven by the slow variable)."""
    if not eps > 0:
        raise ParameterError("model2_coupled needs eps > 0")
    inv = 1.0 / eps

    def f(u):
        return np.array([-u[0], -inv * u[0]])

    def exact(t):
        e = math.exp(-t)
        return np.array([e, 1.0 + (e - 1.0) * inv])

    return OdeSystem(2, f, exact, eps, name=f"model2_coupled:eps={eps!r}")


def linear_from_file(path: str) -> OdeSystem:
    """``u' = M u`` with ``{"matrix": [[...]], "u0": [...]}`` read from JSON.

    ``u0`` defaults to all ones; the reference solution is ``expm(t M) u0``.
    """
    from scipy.linalg import expm

    with open(path) as fh:
        d = json.load(fh)
    M = np.asarray(d["matrix"], dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.all(np.isfinite(M)):
        raise ParameterError(f"{path}: matrix must be square and finite")
    u0 = np.asarray(d.get("u0", np.ones(M.shape[0])), dtype=float)
    if u0.shape != (M.shape[0],):
        raise ParameterError(f"{path}: u0 has wrong length")
    return OdeSystem(M.shape[0], lambda u: M @ u, lambda t: expm(t * M) @ u0, name=f"linear:file={path}")


def parse_problem(text: str, eps: float | None = None) -> OdeSystem:
    """``dahlquist``, ``model2[:eps=v]``, ``model2_coupled[:eps=v]`` or ``linear:file=path``.

    ``eps`` given here takes precedence over the one in ``text``.
    """
    name, _, rest = text.strip().partition(":")
    kv = {}
    if rest:
        for item in rest.split(","):
            k, eq, v = item.partition("=")
            if not eq:
                raise ParameterError(f"malformed problem parameter {item!r}")
            kv[k.strip()] = v.strip()
    allowed = {"dahlquist": set(), "model2": {"eps"}, "model2_coupled": {"eps"}, "linear": {"file"}}
    if name not in allowed:
        raise ParameterError(f"unknown problem {name!r}; choose from {', '.join(allowed)}")
    bad = set(kv) - allowed[name]
    if bad:
        raise ParameterError(f"unknown key(s) {', '.join(sorted(bad))} for problem {name!r}")
    if name == "dahlquist":
        return dahlquist()
    if name == "linear":
        if "file" not in kv:
            raise ParameterError("linear problem needs file=<path>")
        return linear_from_file(kv["file"])
    e = eps if eps is not None else float(kv.get("eps", 1e-5))
    return model2(e) if name == "model2" else model2_coupled(e)


# -- convergence ------------------------------------------------------------------

CONVERGENCE_MODES = ("shrinking-lambda", "fixed-inner", "fixed-lambda")


def run_parameters(mode: str, dts: Sequence[float], eps0: float,
                   lam: float | None = None) -> list[tuple[float, float, float]]:
    """``(dt, lam, eps)`` for each run of a convergence sweep.

    * ``shrinking-lambda``: ``eps = dt_inner = eps0 (dt/dt0)^2``, so ``lam``
      halves with every halving of ``dt``.
    * ``fixed-inner``: ``dt_inner = eps = eps0`` throughout; ``lam = eps0/dt``
      grows as ``dt`` shrinks.
    * ``fixed-lambda``: ``lam`` held at ``lam`` (default ``eps0/dt0``), ``eps``
      held at ``eps0``, so ``dt_inner = lam dt`` shrinks with ``dt``.
    """
    if mode not in CONVERGENCE_MODES:
        raise ParameterError(f"unknown mode {mode!r}; choose from {', '.join(CONVERGENCE_MODES)}")
    if not dts:
        raise ParameterError("empty dt list")
    dt0 = dts[0]
    out = []
    for dt in dts:
        if mode == "shrinking-lambda":
            eps = eps0 * (dt / dt0) ** 2
            out.append((dt, eps / dt, eps))
        elif mode == "fixed-inner":
            out.append((dt, eps0 / dt, eps0))
        else:
            out.append((dt, lam if lam is not None else eps0 / dt0, eps0))
    return out


# a finite error this many times the solution scale still means the run blew up
BLOWUP_FACTOR = 1e6


def _final_error(t, sys: OdeSystem, dt: float, t_end: float) -> tuple[float, bool]:
    u0 = sys.initial()
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            traj = integrate(t, sys, u0, dt, t_end)
    except InstabilityError:
        return math.inf, True
    exact = sys.exact(t_end)
    err = float(np.max(np.abs(traj.final - exact)))
    scale = max(1.0, float(np.max(np.abs(u0))), float(np.max(np.abs(exact))))
    return err, not (math.isfinite(err) and err <= BLOWUP_FACTOR * scale)


def convergence_study(family: str, problem: str, mode: str, dts: Sequence[float], eps0: float,
                      t_end: float = 1.0, lam: float | None = None) -> list[ConvergenceRecord]:
    """Max-norm error at ``t_end`` for each ``dt``; unstable runs become overflow records."""
    build = sch.scheme_family(family)
    dts = list(dts)
    if any(not a > b for a, b in zip(dts, dts[1:])):
        raise ParameterError("dt list must be strictly decreasing")
    records = []
    for dt, lam_i, eps_i in run_parameters(mode, dts, eps0, lam):
        t = build(lam_i)
        if isinstance(t, PartitionedTableau):
            raise ParameterError("convergence studies take single (or embedded) tableaus")
        sys = parse_problem(problem, eps=eps_i)
        err, ovf = _final_error(t, sys, dt, t_end)
        records.append(ConvergenceRecord(dt, lam_i, err, family, eps_i, ovf))
    return records


def slopes_by_record(records: Sequence[ConvergenceRecord]) -> list[float]:
    """Slope attached to each record (NaN for the first usable one and for overflows)."""
    out = [math.nan] * len(records)
    idx = [i for i, r in enumerate(records) if not r.overflow and math.isfinite(r.error) and r.error > 0]
    if len(idx) >= 2:
        for i, s in zip(idx[1:], measured_order([records[i] for i in idx])):
            out[i] = s
    return out


# -- one-step estimator study -------------------------------------------------------


@dataclass(frozen=True)
class EstimatorStudyRow:
    lam: float
    err_corrected: float
    err_low: float
    err_high: float
    estimate: float


def _fixed(f):
    return lambda lam: f()


# name -> (embedded pair as lam -> EmbeddedTableau, corrected scheme or None)
ESTIMATOR_SCHEMES: dict[str, tuple[Callable, Callable | None]] = {
    "ephpfe": (sch.ephpfe, None),
    "posv": (sch.posv_embedded, sch.posv),
    "pisv": (sch.pisv_embedded, sch.pisv),
    "embedded_heun_fe": (_fixed(sch.embedded_heun_fe), None),
    "emr": (_fixed(sch.fe_step_doubling), _fixed(sch.emr)),
}
_ALIASES = {"posv_embedded": "posv", "pisv_embedded": "pisv", "ehfe": "embedded_heun_fe"}


def estimator_study(scheme: str, lams: Sequence[float], dt: float = 0.1) -> list[EstimatorStudyRow]:
    """One macro step of ``u' = -u`` from ``u = 1`` for each ``lam``.

    ``err_low``, ``err_high`` and ``estimate`` all come from a single embedded
    step; ``err_corrected`` is NaN when the scheme has no corrected variant.
    """
    key = _ALIASES.get(scheme, scheme)
    if key not in ESTIMATOR_SCHEMES:
        raise ParameterError(f"no estimator study for {scheme!r}; choose from "
                             f"{', '.join(list(ESTIMATOR_SCHEMES) + list(_ALIASES))}")
    pair_of, corrected_of = ESTIMATOR_SCHEMES[key]
    sys = dahlquist()
    u0 = np.array([1.0])
    exact = float(sys.exact(dt)[0])
    rows = []
    for lam in lams:
        pair: EmbeddedTableau = pair_of(lam)
        res = embedded_step(pair, sys, u0, dt)
        err_high = abs(float(res.u_next[0]) - exact)
        err_low = abs(float(res.u_low[0]) - exact)
        estimate = abs(float(res.error_estimate[0]))
        err_corr = math.nan
        if corrected_of is not None:
            err_corr = abs(float(rk_step(corrected_of(lam), sys, u0, dt).u_next[0]) - exact)
        rows.append(EstimatorStudyRow(float(lam), err_corr, err_low, err_high, estimate))
    return rows


def limit_check(outer: str, K: int, lams: Sequence[float]) -> list[tuple[float, float, float]]:
    """``(lam, deviation, deviation / previous deviation)`` for the PRK limit."""
    base = sch.parse_scheme(outer)
    out = []
    prev = None
    for lam in lams:
        d = prk_limit_deviation(base, K, lam)
        out.append((float(lam), d, d / prev if prev not in (None, 0.0) else math.nan))
        prev = d
    return out


def log_sweep(spec: str) -> list[float]:
    """``"log:a:b:n"`` for ``n`` points from ``10**a`` to ``10**b``, or a comma list."""
    spec = spec.strip()
    if spec.startswith("log:"):
        try:
            _, a, b, n = spec.split(":")
            return [float(x) for x in np.logspace(float(a), float(b), int(n))]
        except ValueError as exc:
            raise ParameterError(f"bad sweep {spec!r}; expected log:<a>:<b>:<n>") from exc
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad number list {spec!r}") from exc
