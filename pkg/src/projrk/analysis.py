"""Linear stability, the vanishing-``lam`` limit of PRK tableaus, and observed orders."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .schemes import prk
from .tableau import EmbeddedTableau, ParameterError, PiParams, Tableau

__all__ = [
    "stability_value",
    "stability_value_resolvent",
    "pfe_stability_closed_form",
    "StabilityGrid",
    "stability_grid",
    "default_window",
    "prk_limit_tableau",
    "prk_limit_deviation",
    "ConvergenceRecord",
    "measured_order",
]


def _plain(t) -> Tableau:
    if isinstance(t, EmbeddedTableau):
        return t.base
    if not isinstance(t, Tableau):
        raise ParameterError(f"stability needs a single tableau, got {type(t).__name__}")
    return t


def stability_value(t: Tableau, z):
    """Amplification factor ``g(z)`` for ``u' = mu u``, ``z = dt * mu``.

    Evaluated by the stage recursion ``k_j = z (1 + sum_l A[j,l] k_l)``,
    ``g = 1 + sum_j b_j k_j``, which is exact for explicit tableaus.
    Accepts scalars or arrays of ``z``.
    """
    t = _plain(t)
    z = np.asarray(z, dtype=complex)
    A, b = t.A_arr, t.b_arr
    k: list[np.ndarray] = []
    g = np.ones_like(z)
    for j in range(t.s):
        acc = np.ones_like(z)
        for l in range(j):
            if A[j, l] != 0.0:
                acc = acc + A[j, l] * k[l]
        kj = z * acc
        k.append(kj)
        if b[j] != 0.0:
            g = g + b[j] * kj
    return g[()] if g.ndim == 0 else g


def stability_value_resolvent(t: Tableau, z) -> complex:
    """``1 + z b^T (I - z A)^{-1} e`` by a dense complex solve (reference path)."""
    t = _plain(t)
    s = t.s
    M = np.eye(s, dtype=complex) - complex(z) * t.A_arr
    y = np.linalg.solve(M, np.ones(s, dtype=complex))
    return complex(1 + complex(z) * (t.b_arr @ y))


def pfe_stability_closed_form(p: PiParams, z):
    """Closed-form ``g(z)`` of projective forward Euler."""
    K, lam = p.K, p.lam
    z = np.asarray(z, dtype=complex)
    r = 1 + lam * z
    inner = sum((r**j for j in range(K)), np.zeros_like(z))
    g = 1 + z * (lam * inner + (1 - K * lam) * r**K)
    return g[()] if g.ndim == 0 else g


@dataclass(frozen=True)
class StabilityGrid:
    """``|g|`` sampled on a rectangular window; ``g_abs[i, j]`` is at ``(re[i], im[j])``."""

    re_axis: np.ndarray
    im_axis: np.ndarray
    g_abs: np.ndarray
    eps: float
    scheme: str = ""

    @property
    def markers(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Slow and fast cluster points ``(-1, 0)`` and ``(-1/eps, 0)``."""
        return (-1.0, 0.0), (-1.0 / self.eps, 0.0)

    def write_csv(self, path, precision: int = 17) -> None:
        fmt = f"{{:.{precision}g}}"
        with open(path, "w", newline="\n") as fh:
            fh.write("re,im,g_abs\n")
            for i, x in enumerate(self.re_axis):
                for j, y in enumerate(self.im_axis):
                    fh.write(f"{fmt.format(float(x))},{fmt.format(float(y))},{fmt.format(float(self.g_abs[i, j]))}\n")

    def sidecar(self) -> dict:
        return {
            "scheme": self.scheme,
            "window": {"re": [float(self.re_axis[0]), float(self.re_axis[-1])],
                       "im": [float(self.im_axis[0]), float(self.im_axis[-1])]},
            "nx": int(self.re_axis.size),
            "ny": int(self.im_axis.size),
            "eps": self.eps,
            "markers": [list(m) for m in self.markers],
        }

    def write_sidecar(self, path, extra: dict | None = None) -> None:
        d = self.sidecar()
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=2, sort_keys=True)
            fh.write("\n")


def default_window(kind: str, lam: float | None = None) -> tuple[tuple[float, float], tuple[float, float]]:
    """``(re_bounds, im_bounds)`` for the slow cluster or for the fast one."""
    if kind == "slow":
        return (-4.0, 0.5), (-2.5, 2.5)
    if kind == "fast":
        if not lam or lam <= 0:
            raise ParameterError("fast window needs a positive lam")
        return (-2.0 / lam, 0.0), (-0.5 / lam, 0.5 / lam)
    raise ParameterError(f"unknown window kind {kind!r}")


def stability_grid(t: Tableau, re_bounds=(-4.0, 0.5), im_bounds=(-2.5, 2.5), nx: int = 801,
                   ny: int = 501, eps: float = 1e-5, workers: int = 1) -> StabilityGrid:
    """Sample ``|g|`` on a uniform grid.

    Rows of constant real part are split across ``workers`` threads; every
    point is computed independently, so the result does not depend on the split.
    """
    t = _plain(t)
    if nx < 2 or ny < 2:
        raise ParameterError("nx and ny must be at least 2")
    (r0, r1), (i0, i1) = re_bounds, im_bounds
    if not (r0 < r1 and i0 < i1):
        raise ParameterError("window bounds must be strictly increasing")
    re = np.linspace(r0, r1, nx)
    im = np.linspace(i0, i1, ny)
    out = np.empty((nx, ny))

    def fill(rows: np.ndarray) -> None:
        # one row per call keeps array shapes identical for any split
        for i in rows:
            out[i] = np.abs(stability_value(t, re[i] + 1j * im))

    chunks = np.array_split(np.arange(nx), max(1, int(workers)))
    if workers <= 1:
        for ch in chunks:
            fill(ch)
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            list(pool.map(fill, chunks))
    return StabilityGrid(re, im, out, float(eps), t.name)


# -- the lam -> 0 limit ---------------------------------------------------------


def prk_limit_tableau(outer: Tableau, K: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Entries a PRK tableau tends to as ``lam -> 0``, built from the outer method alone.

    Each outer coefficient ``a_{s,l}`` lands in the last column of block
    ``(s, l)``, outer weights ``b_s`` in the last slot of block ``s``, and every
    node of block ``s`` becomes ``c_s``.
    """
    outer = _plain(outer)
    n = K + 1
    N = outer.s * n
    A = np.zeros((N, N))
    b = np.zeros(N)
    c = np.repeat(np.asarray(outer.c), n)
    for s in range(outer.s):
        b[s * n + K] = outer.b[s]
        for l in range(s):
            A[s * n:(s + 1) * n, l * n + K] = outer.A[s][l]
    return c, A, b


def prk_limit_deviation(outer: Tableau, K: int, lam: float) -> float:
    """Largest entrywise distance between ``prk(outer, K, lam)`` and its ``lam -> 0`` limit."""
    t = prk(_plain(outer), PiParams(K, lam))
    c0, A0, b0 = prk_limit_tableau(outer, K)
    return float(max(np.max(np.abs(t.c_arr - c0)),
                     np.max(np.abs(t.A_arr - A0)),
                     np.max(np.abs(t.b_arr - b0))))


# -- observed convergence order -------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRecord:
    dt: float
    lam: float
    error: float
    scheme: str
    eps: float = math.nan
    overflow: bool = False


def measured_order(records: Sequence[ConvergenceRecord]) -> list[float]:
    """Observed orders ``log(e_i / e_{i+1}) / log(dt_i / dt_{i+1})`` between usable records.

    Records must be sorted by decreasing ``dt``. Overflowed records are
    dropped with a warning; for dt-halvings the slopes are ``log2`` ratios.
    """
    usable = [r for r in records if not r.overflow and math.isfinite(r.error)]
    dropped = len(records) - len(usable)
    if dropped:
        warnings.warn(f"measured_order: ignoring {dropped} overflowed record(s)", RuntimeWarning,
                      stacklevel=2)
    if len(usable) < 2:
        raise ParameterError("need at least two usable records to measure an order")
    for a, b in zip(usable, usable[1:]):
        if not a.dt > b.dt:
            raise ParameterError("records must be sorted by strictly decreasing dt")
        if a.error <= 0 or b.error <= 0:
            raise ParameterError("errors must be positive to measure an order")
    return [math.log(a.error / b.error) / math.log(a.dt / b.dt) for a, b in zip(usable, usable[1:])]
