"""Builders for classical, projective, telescopic, embedded and partitioned schemes.

Every builder is a pure function of its parameters. ``prk`` is the generic
projective Runge-Kutta construction; the fixed-``K`` schemes (``prk4k1``,
``prk4k2``, ``ephpfe``, ``posv``, ``pisv``) are typed in entry by entry so they
can serve as independent references for it.

Scheme identifiers such as ``"pfe:K=2,lam=0.1"`` are handled by
:func:`parse_scheme`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tableau import (
    EmbeddedTableau,
    ParameterError,
    PartitionedTableau,
    PiParams,
    Tableau,
    validate,
)

__all__ = [
    "TelescopicParams",
    "fe", "heun", "emr", "rk4_38", "embedded_heun_fe", "fe_step_doubling",
    "pfe", "prk", "tpfe", "prk4k1", "prk4k2",
    "ephpfe", "posv", "posv_embedded", "pisv", "pisv_embedded",
    "safe", "sapfe", "sappfe",
    "parse_scheme", "scheme_family", "SCHEME_GRAMMAR", "SCHEMES",
]


def _lower(rows: list[list[float]]) -> tuple[tuple[float, ...], ...]:
    """Pad ragged lower-triangular rows with zeros to a full square matrix."""
    s = len(rows)
    return tuple(tuple(list(r) + [0.0] * (s - len(r))) for r in rows)


# -- classical methods -------------------------------------------------------


def fe() -> Tableau:
    return Tableau("fe", (0.0,), ((0.0,),), (1.0,))


def heun() -> Tableau:
    return Tableau("heun", (0.0, 1.0), _lower([[], [1.0]]), (0.5, 0.5))


def emr() -> Tableau:
    """Explicit midpoint rule."""
    return Tableau("emr", (0.0, 0.5), _lower([[], [0.5]]), (0.0, 1.0))


def rk4_38() -> Tableau:
    """Kutta's 3/8-rule; the fourth-order outer method of the PRK4 schemes."""
    return Tableau(
        "rk4_38",
        (0.0, 1 / 3, 2 / 3, 1.0),
        _lower([[], [1 / 3], [-1 / 3, 1.0], [1.0, -1.0, 1.0]]),
        (1 / 8, 3 / 8, 3 / 8, 1 / 8),
    )


def embedded_heun_fe() -> EmbeddedTableau:
    """Heun (order 2) with forward Euler (order 1) embedded."""
    return EmbeddedTableau(heun().renamed("embedded_heun_fe"), (1.0, 0.0), 2, 1)


def fe_step_doubling() -> EmbeddedTableau:
    """Two forward Euler half steps against one full step.

    The Richardson-corrected combination of the two is :func:`emr`.
    """
    base = Tableau("fe_step_doubling", (0.0, 0.5), _lower([[], [0.5]]), (0.5, 0.5))
    return EmbeddedTableau(base, (1.0, 0.0), 2, 1)


# -- projective forward Euler and projective Runge-Kutta -----------------------


def _pi(p: PiParams | None, K, lam) -> PiParams:
    if p is not None:
        return p
    return PiParams(K, lam)


def pfe(p: PiParams | None = None, *, K: int | None = None, lam: float | None = None) -> Tableau:
    """Projective forward Euler: ``K+1`` inner FE steps then extrapolation."""
    p = _pi(p, K, lam)
    K, lam = p.K, p.lam
    n = K + 1
    c = tuple(lam * k for k in range(n))
    A = tuple(tuple(lam if j < i else 0.0 for j in range(n)) for i in range(n))
    b = tuple([lam] * K + [1.0 - K * lam])
    return Tableau(f"pfe:K={K},lam={lam!r}", c, A, b)


def _check_prk_outer(outer: Tableau) -> None:
    if outer.c[0] != 0.0:
        raise ParameterError(f"outer method {outer.name!r} must have c[0] = 0")
    for s in range(1, outer.s):
        if not outer.c[s] > 0.0:
            raise ParameterError(
                f"outer method {outer.name!r} has c[{s}] = {outer.c[s]!r}; projective stages need c > 0"
            )
    rep = validate(outer)
    if rep.flags:
        raise ParameterError(f"outer method {outer.name!r} is not consistent: {', '.join(rep.flags)}")


def _prk_weights(bw, K: int, lam: float) -> list[float]:
    n = K + 1
    proj = 1.0 - n * lam
    out = [0.0] * (len(bw) * n)
    for k in range(n):
        out[k] = lam
    for s, bs in enumerate(bw):
        out[s * n + K] += proj * bs
    return out


def prk(outer: Tableau | EmbeddedTableau, p: PiParams | None = None, *,
        K: int | None = None, lam: float | None = None) -> Tableau | EmbeddedTableau:
    """Projective Runge-Kutta scheme written as one ``S*(K+1)``-stage tableau.

    Each outer stage becomes a block of ``K+1`` forward Euler micro-steps; the
    extrapolation towards outer node ``c_s`` enters through the last column of
    every sub-diagonal block. An embedded outer pair yields an embedded PRK
    pair with both weight vectors transformed identically.
    """
    p = _pi(p, K, lam)
    K, lam = p.K, p.lam
    base = outer.base if isinstance(outer, EmbeddedTableau) else outer
    _check_prk_outer(base)
    if isinstance(outer, EmbeddedTableau):
        rep = validate(outer.low)
        if rep.flags:
            raise ParameterError(f"embedded weights of {outer.name!r} are not first order")
    S, n = base.s, K + 1
    N = S * n
    c = [0.0] * N
    A = np.zeros((N, N))
    for s in range(S):
        cs = base.c[s]
        for k in range(n):
            i = s * n + k
            c[i] = cs + lam * k
            A[i, s * n:s * n + k] = lam
            if s == 0:
                continue
            A[i, :n] = lam
            for l in range(s):
                # lam * a~_{s,l} with a~ = (c_s/lam - (K+1)) a_{s,l} / c_s
                A[i, l * n + K] += (cs - n * lam) * base.A[s][l] / cs
    name = f"prk:outer={base.name},K={K},lam={lam!r}"
    t = Tableau(name, tuple(c), tuple(map(tuple, A)), tuple(_prk_weights(base.b, K, lam)))
    if isinstance(outer, EmbeddedTableau):
        return EmbeddedTableau(t, tuple(_prk_weights(outer.b_tilde, K, lam)),
                               outer.order_high, outer.order_low)
    return t


# -- telescopic projective forward Euler ------------------------------------


@dataclass(frozen=True)
class TelescopicParams:
    """Two-level telescopic PFE parameters.

    Level 0 takes ``K0+1`` steps of ``lam0 * dt`` and extrapolates over
    ``M0`` more; level 1 repeats that ``K1+1`` times and extrapolates over
    ``M1`` level-1 steps. The levels must tile the macro step exactly.
    """

    K0: int
    M0: int
    K1: int
    M1: int
    lam0: float

    def __post_init__(self):
        for key in ("K0", "M0", "K1", "M1"):
            v = getattr(self, key)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise ParameterError(f"{key} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, key, int(v))
        lam0 = float(self.lam0)
        if not math.isfinite(lam0) or lam0 <= 0:
            raise ParameterError(f"lam0 must be positive, got {self.lam0!r}")
        object.__setattr__(self, "lam0", lam0)
        tile = lam0 * (self.K0 + 1 + self.M0) * (self.K1 + 1 + self.M1)
        if abs(tile - 1.0) > 1e-12:
            raise ParameterError(
                f"lam0*(K0+1+M0)*(K1+1+M1) = {tile!r} != 1: levels do not tile the macro step"
            )

    @property
    def lam1(self) -> float:
        return self.lam0 * (self.K0 + 1 + self.M0)

    @classmethod
    def tiled(cls, K0: int, M0: int, K1: int, M1: int) -> "TelescopicParams":
        return cls(K0, M0, K1, M1, 1.0 / ((K0 + 1 + M0) * (K1 + 1 + M1)))


def tpfe(tp: TelescopicParams) -> Tableau:
    """Telescopic PFE with two projective levels as a ``(K0+1)(K1+1)``-stage tableau."""
    n0, n1 = tp.K0 + 1, tp.K1 + 1
    lam0, lam1 = tp.lam0, tp.lam1
    N = n0 * n1
    c = [0.0] * N
    A = np.zeros((N, N))
    sub = np.full(n0, lam0)
    sub[-1] = lam0 * (1 + tp.M0)
    for k1 in range(n1):
        for k0 in range(n0):
            i = k1 * n0 + k0
            c[i] = k1 * lam1 + k0 * lam0
            A[i, k1 * n0:k1 * n0 + k0] = lam0
            for j in range(k1):
                A[i, j * n0:(j + 1) * n0] = sub
    b = np.concatenate([sub] * tp.K1 + [(1 + tp.M1) * sub])
    name = f"tpfe:K0={tp.K0},M0={tp.M0},K1={tp.K1},M1={tp.M1},lam0={lam0!r}"
    return Tableau(name, tuple(c), tuple(map(tuple, A)), tuple(b))


# -- fixed tableaus typed in entry by entry -----------------------------------


def _check_lam(lam: float, hi: float, who: str) -> float:
    lam = float(lam)
    if not (0.0 < lam <= hi):
        raise ParameterError(f"{who}: lam must lie in (0, {hi:g}], got {lam!r}")
    return lam


def prk4k1(lam: float) -> Tableau:
    """3/8-rule PRK with two micro-steps per outer stage (8 stages)."""
    l = _check_lam(lam, 0.5, "prk4k1")  # noqa: E741
    rows = [
        [],
        [l],
        [l, 1 / 3 - l],
        [l, 1 / 3 - l, l],
        [l, -1 / 3 + 2 * l, 0, 1 - 3 * l],
        [l, -1 / 3 + 2 * l, 0, 1 - 3 * l, l],
        [l, 1 - l, 0, -1 + 2 * l, 0, 1 - 2 * l],
        [l, 1 - l, 0, -1 + 2 * l, 0, 1 - 2 * l, l],
    ]
    c = (0.0, l, 1 / 3, 1 / 3 + l, 2 / 3, 2 / 3 + l, 1.0, 1 + l)
    b = (l, 1 / 8 + 3 / 4 * l, 0.0, 3 / 8 - 6 / 8 * l, 0.0, 3 / 8 - 6 / 8 * l, 0.0, 1 / 8 - 1 / 4 * l)
    return Tableau(f"prk4k1:lam={l!r}", c, _lower(rows), b)


def prk4k2(lam: float, as_printed: bool = False) -> Tableau:
    """3/8-rule PRK with three micro-steps per outer stage (12 stages).

    The published table carries ``-1/3 - 5/2 lam`` in column 2 of rows 6-8,
    which breaks the row-sum condition of those stages by ``5 lam``; the default uses
    the consistent ``-1/3 + 5/2 lam``. ``as_printed=True`` reproduces the
    published entry.
    """
    l = _check_lam(lam, 1 / 3, "prk4k2")  # noqa: E741
    a62 = -1 / 3 - 5 / 2 * l if as_printed else -1 / 3 + 5 / 2 * l
    rows = [
        [],
        [l],
        [l, l],
        [l, l, 1 / 3 - 2 * l],
        [l, l, 1 / 3 - 2 * l, l],
        [l, l, 1 / 3 - 2 * l, l, l],
        [l, l, a62, 0, 0, 1 - 9 / 2 * l],
        [l, l, a62, 0, 0, 1 - 9 / 2 * l, l],
        [l, l, a62, 0, 0, 1 - 9 / 2 * l, l, l],
        [l, l, 1 - 2 * l, 0, 0, -1 + 3 * l, 0, 0, 1 - 3 * l],
        [l, l, 1 - 2 * l, 0, 0, -1 + 3 * l, 0, 0, 1 - 3 * l, l],
        [l, l, 1 - 2 * l, 0, 0, -1 + 3 * l, 0, 0, 1 - 3 * l, l, l],
    ]
    c = (0.0, l, 2 * l, 1 / 3, 1 / 3 + l, 1 / 3 + 2 * l,
         2 / 3, 2 / 3 + l, 2 / 3 + 2 * l, 1.0, 1 + l, 1 + 2 * l)
    b = (l, l, 1 / 8 + 5 / 8 * l, 0.0, 0.0, 3 / 8 - 9 / 8 * l,
         0.0, 0.0, 3 / 8 - 9 / 8 * l, 0.0, 0.0, 1 / 8 - 3 / 8 * l)
    tag = ",as_printed=1" if as_printed else ""
    return Tableau(f"prk4k2:lam={l!r}{tag}", c, _lower(rows), b)


def ephpfe(lam: float) -> EmbeddedTableau:
    """Embedded projective Heun / projective forward Euler pair, K=2."""
    l = _check_lam(lam, 1 / 3, "ephpfe")  # noqa: E741
    rows = [
        [],
        [l],
        [l, l],
        [l, l, 1 - 2 * l],
        [l, l, 1 - 2 * l, l],
        [l, l, 1 - 2 * l, l, l],
    ]
    c = (0.0, l, 2 * l, 1.0, 1 + l, 1 + 2 * l)
    b = (l, l, 0.5 - 0.5 * l, 0.0, 0.0, 0.5 - 1.5 * l)
    bt = (l, l, 1 - 2 * l, 0.0, 0.0, 0.0)
    return EmbeddedTableau(Tableau(f"ephpfe:lam={l!r}", c, _lower(rows), b), bt, 2, 1)


def _posv_stages(l: float):
    rows = [
        [],
        [l],
        [l, l],
        [l, l, 0.5 - 2 * l],
        [l, l, 0.5 - 2 * l, l],
        [l, l, 0.5 - 2 * l, l, l],
    ]
    c = (0.0, l, 2 * l, 0.5, 0.5 + l, 0.5 + 2 * l)
    return c, _lower(rows)


def posv(lam: float) -> Tableau:
    """Projective outer step size variation, Richardson-corrected (K=2)."""
    l = _check_lam(lam, 1 / 3, "posv")  # noqa: E741
    c, A = _posv_stages(l)
    return Tableau(f"posv:lam={l!r}", c, A, (l, l, 0.0, 0.0, 0.0, 1 - 2 * l))


def posv_embedded(lam: float) -> EmbeddedTableau:
    """Projective PFE at step ``dt/2`` twice against ``dt`` once (K=2)."""
    l = _check_lam(lam, 1 / 3, "posv_embedded")  # noqa: E741
    c, A = _posv_stages(l)
    b = (l, l, 0.5 - 0.5 * l, 0.0, 0.0, 0.5 - 1.5 * l)
    bt = (l, l, 1 - 2 * l, 0.0, 0.0, 0.0)
    return EmbeddedTableau(Tableau(f"posv_embedded:lam={l!r}", c, A, b), bt, 2, 1)


def _pisv_stages(l: float):
    return (0.0, l, 1.5 * l), _lower([[], [l], [l, 0.5 * l]])


def pisv(lam: float) -> Tableau:
    """Projective inner step size variation, corrected (K=1)."""
    l = _check_lam(lam, 0.5, "pisv")  # noqa: E741
    c, A = _pisv_stages(l)
    return Tableau(f"pisv:lam={l!r}", c, A, (l, 0.0, 1 - l))


def pisv_embedded(lam: float) -> EmbeddedTableau:
    """PFE with the last inner step halved against plain PFE (K=1)."""
    l = _check_lam(lam, 0.5, "pisv_embedded")  # noqa: E741
    c, A = _pisv_stages(l)
    base = Tableau(f"pisv_embedded:lam={l!r}", c, A, (l, 0.5 * l, 1 - 1.5 * l))
    return EmbeddedTableau(base, (l, 1 - l, 0.0), 2, 1)


# -- space adaptive (partitioned) schemes -------------------------------------


def _right_fe(c: tuple[float, ...], name: str) -> Tableau:
    """Non-stiff part: every stage extrapolates from the first slope."""
    n = len(c)
    A = tuple(tuple(c[i] if (j == 0 and i > 0) else 0.0 for j in range(n)) for i in range(n))
    return Tableau(name, c, A, tuple([1.0] + [0.0] * (n - 1)))


def safe(M: int, normalize: bool = True) -> PartitionedTableau:
    """Space adaptive forward Euler with ``M`` substeps of ``dt/M`` on the stiff part.

    The published left weights are ``lam`` on all ``M+1`` stages, which sum to
    ``1 + 1/M``; ``normalize=True`` zeroes the last weight so the left part is
    exactly ``M`` forward Euler substeps.
    """
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise ParameterError(f"safe: M must be a positive integer, got {M!r}")
    M = int(M)
    lam = 1.0 / M
    n = M + 1
    c = tuple(k * lam for k in range(n))
    A = tuple(tuple(lam if j < i else 0.0 for j in range(n)) for i in range(n))
    b = [lam] * n
    if normalize:
        b[-1] = 0.0
    name = f"safe:M={M},normalize={int(bool(normalize))}"
    return PartitionedTableau(Tableau(name + "/L", c, A, tuple(b)), _right_fe(c, name + "/R"), name)


def sapfe(p: PiParams | None = None, *, K: int | None = None, lam: float | None = None) -> PartitionedTableau:
    """Space adaptive PFE: PFE on the stiff part, FE on the non-stiff part."""
    p = _pi(p, K, lam)
    left = pfe(p)
    name = f"sapfe:K={p.K},lam={p.lam!r}"
    return PartitionedTableau(left.renamed(name + "/L"), _right_fe(left.c, name + "/R"), name)


def sappfe(lamL: float, lamR: float) -> PartitionedTableau:
    """Space adaptive projective-projective FE, ``K_L = K_R = 2``, entries as published.

    Both published parts violate the row-sum condition at one stage and the
    left weights sum to ``1 + lamL``; :func:`validate` reports this.
    """
    lL, lR = float(lamL), float(lamR)
    if not (0.0 < 2 * lL < lR and 2 * lR < 1.0):
        raise ParameterError(
            f"sappfe needs 0 < 2*lamL < lamR and 2*lamR < 1, got lamL={lamL!r}, lamR={lamR!r}"
        )
    c = (0.0, lL, 2 * lL, lR, 2 * lR)
    left = _lower([
        [],
        [lL],
        [lL, lL],
        [lL, lL, lR - 2 * lL],
        [lL, lL, 0.0, lR - 2 * lL],
    ])
    right = _lower([
        [],
        [lL],
        [lL, 0.0],
        [lR, 0.0, 0.0],
        [lR, 0.0, 0.0, lR],
    ])
    name = f"sappfe:lamL={lL!r},lamR={lR!r}"
    return PartitionedTableau(
        Tableau(name + "/L", c, left, (lL, lL, 1 - lL, 0.0, 0.0)),
        Tableau(name + "/R", c, right, (0.0, 0.0, lR, lR, 1 - 2 * lR)),
        name,
    )


# -- scheme identifiers --------------------------------------------------------

_CLASSICAL: dict[str, Callable[[], Tableau | EmbeddedTableau]] = {
    "fe": fe,
    "heun": heun,
    "emr": emr,
    "rk4_38": rk4_38,
    "embedded_heun_fe": embedded_heun_fe,
    "fe_step_doubling": fe_step_doubling,
}


def _to_int(v: str) -> int:
    x = float(v)
    if x != int(x):
        raise ValueError(f"{v!r} is not an integer")
    return int(x)


def _to_bool(v: str) -> bool:
    if v.lower() in ("1", "true", "on", "yes"):
        return True
    if v.lower() in ("0", "false", "off", "no"):
        return False
    raise ValueError(f"{v!r} is not a flag")


def _to_outer(v: str):
    if v not in _CLASSICAL:
        raise ValueError(f"unknown outer method {v!r} (choose from {', '.join(_CLASSICAL)})")
    return _CLASSICAL[v]()


# name -> (builder taking keyword args, {key: converter}, {key: default})
SCHEMES: dict[str, tuple[Callable, dict[str, Callable], dict]] = {
    **{k: (lambda _f=f: _f(), {}, {}) for k, f in _CLASSICAL.items()},
    "pfe": (lambda K, lam: pfe(K=K, lam=lam), {"K": _to_int, "lam": float}, {}),
    "prk": (lambda outer, K, lam: prk(outer, K=K, lam=lam),
            {"outer": _to_outer, "K": _to_int, "lam": float}, {}),
    "tpfe": (lambda **kw: tpfe(TelescopicParams(**kw)),
             {"K0": _to_int, "M0": _to_int, "K1": _to_int, "M1": _to_int, "lam0": float}, {}),
    "prk4k1": (lambda lam: prk4k1(lam), {"lam": float}, {}),
    "prk4k2": (lambda lam, as_printed: prk4k2(lam, as_printed),
               {"lam": float, "as_printed": _to_bool}, {"as_printed": False}),
    "ephpfe": (lambda lam: ephpfe(lam), {"lam": float}, {}),
    "posv": (lambda lam: posv(lam), {"lam": float}, {}),
    "posv_embedded": (lambda lam: posv_embedded(lam), {"lam": float}, {}),
    "pisv": (lambda lam: pisv(lam), {"lam": float}, {}),
    "pisv_embedded": (lambda lam: pisv_embedded(lam), {"lam": float}, {}),
    "safe": (lambda M, normalize: safe(M, normalize), {"M": _to_int, "normalize": _to_bool},
             {"normalize": True}),
    "sapfe": (lambda K, lam: sapfe(K=K, lam=lam), {"K": _to_int, "lam": float}, {}),
    "sappfe": (lambda lamL, lamR: sappfe(lamL, lamR), {"lamL": float, "lamR": float}, {}),
}

SCHEME_GRAMMAR = """\
scheme id grammar:  NAME[:KEY=VALUE[,KEY=VALUE...]]
  fe | heun | emr | rk4_38 | embedded_heun_fe | fe_step_doubling
  pfe:K=<int>,lam=<float>              sapfe:K=<int>,lam=<float>
  prk:outer=<classical>,K=<int>,lam=<float>
  tpfe:K0=<int>,M0=<int>,K1=<int>,M1=<int>,lam0=<float>
  prk4k1:lam=<float>                   prk4k2:lam=<float>[,as_printed=0|1]
  ephpfe:lam=<float>   posv:lam=<float>   posv_embedded:lam=<float>
  pisv:lam=<float>     pisv_embedded:lam=<float>
  safe:M=<int>[,normalize=0|1]         sappfe:lamL=<float>,lamR=<float>"""


def split_scheme_id(text: str) -> tuple[str, dict[str, str]]:
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in SCHEMES:
        raise ParameterError(f"unknown scheme {name!r}\n{SCHEME_GRAMMAR}")
    raw: dict[str, str] = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ParameterError(f"malformed parameter {item!r} in {text!r}; expected KEY=VALUE")
            raw[key.strip()] = val.strip()
    return name, raw


def parse_scheme(text: str, **overrides):
    """Build the scheme named by an identifier such as ``"prk:outer=rk4_38,K=1,lam=0.05"``.

    Keyword ``overrides`` supply values for keys missing from ``text``
    (used to sweep ``lam``).
    """
    name, raw = split_scheme_id(text)
    builder, conv, defaults = SCHEMES[name]
    unknown = set(raw) - set(conv)
    if unknown:
        valid = ", ".join(conv) or "(none)"
        raise ParameterError(f"unknown key(s) {', '.join(sorted(unknown))} for {name!r}; valid keys: {valid}")
    kwargs = dict(defaults)
    for key, val in overrides.items():
        if key in conv and key not in raw:
            kwargs[key] = val
    for key, val in raw.items():
        try:
            kwargs[key] = conv[key](val)
        except ValueError as exc:
            raise ParameterError(f"bad value for {key!r} in {text!r}: {exc}") from exc
    missing = [k for k in conv if k not in kwargs]
    if missing:
        raise ParameterError(f"missing key(s) {', '.join(missing)} for {name!r}\n{SCHEME_GRAMMAR}")
    return builder(**kwargs)


def scheme_family(text: str) -> Callable[[float], Tableau | EmbeddedTableau | PartitionedTableau]:
    """Return ``lam -> scheme`` for an identifier whose ``lam`` is left open.

    Schemes without a ``lam`` key ignore the argument.
    """
    name, raw = split_scheme_id(text)
    if "lam" in raw:
        raise ParameterError(f"scheme family {text!r} must not fix lam")
    conv = SCHEMES[name][1]
    unknown = set(raw) - set(conv)
    if unknown:
        raise ParameterError(f"unknown key(s) {', '.join(sorted(unknown))} for {name!r}; "
                             f"valid keys: {', '.join(conv) or '(none)'}")
    takes_lam = "lam" in conv

    def build(lam: float):
        return parse_scheme(text, lam=lam) if takes_lam else parse_scheme(text)

    build.takes_lam = takes_lam  # type: ignore[attr-defined]
    return build
