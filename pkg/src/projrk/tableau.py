"""Butcher tableau data model, order-condition checks and JSON round-tripping.

Three immutable carriers are provided:

* :class:`Tableau` -- nodes ``c``, strictly lower triangular ``A``, weights ``b``.
* :class:`EmbeddedTableau` -- a tableau plus a second weight vector ``b_tilde``.
* :class:`PartitionedTableau` -- two tableaus with the same stages, one for the
  stiff variables and one for the non-stiff ones.

Entries are stored as tuples of Python floats so that equality is bit-exact;
numpy views are available through the ``*_arr`` properties.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

__all__ = [
    "TableauError",
    "ParameterError",
    "TableauParseError",
    "Tableau",
    "EmbeddedTableau",
    "PartitionedTableau",
    "PiParams",
    "ValidationReport",
    "validate",
    "validate_all",
    "order2_residual_closed_form",
    "to_json",
    "from_json",
    "to_dict",
    "from_dict",
]

DEFAULT_TOL = 1e-12


class TableauError(ValueError):
    """A tableau is structurally malformed (shape, finiteness, explicitness)."""


class ParameterError(ValueError):
    """Scheme or run parameters violate a precondition."""


class TableauParseError(ValueError):
    """Serialized tableau text could not be decoded."""

    def __init__(self, msg: str, pos: int | None = None, field_name: str | None = None):
        if pos is not None:
            msg = f"{msg} (at char {pos})"
        super().__init__(msg)
        self.pos = pos
        self.field = field_name


def _as_float_tuple(values, what: str) -> tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except TypeError as exc:
        raise TableauError(f"{what} must be a sequence of numbers") from exc
    return out


@dataclass(frozen=True)
class Tableau:
    """Explicit Runge-Kutta scheme ``(c, A, b)``."""

    name: str
    c: tuple[float, ...]
    A: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]

    def __post_init__(self):
        c = _as_float_tuple(self.c, "c")
        b = _as_float_tuple(self.b, "b")
        try:
            A = tuple(_as_float_tuple(row, "A row") for row in self.A)
        except TypeError as exc:
            raise TableauError("A must be a sequence of rows") from exc
        s = len(c)
        if s == 0:
            raise TableauError("tableau needs at least one stage")
        if len(b) != s:
            raise TableauError(f"len(b)={len(b)} does not match len(c)={s}")
        if len(A) != s or any(len(row) != s for row in A):
            raise TableauError(f"A must be {s}x{s}")
        flat = c + b + tuple(x for row in A for x in row)
        if not all(math.isfinite(x) for x in flat):
            raise TableauError("tableau entries must be finite")
        for i, row in enumerate(A):
            for j in range(i, s):
                if row[j] != 0.0:
                    raise TableauError(
                        f"A[{i}][{j}]={row[j]!r}: coefficient matrix must be strictly lower triangular"
                    )
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_arrays(cls, name: str, c, A, b) -> "Tableau":
        return cls(name, tuple(np.asarray(c, dtype=float)),
                   tuple(tuple(r) for r in np.asarray(A, dtype=float)),
                   tuple(np.asarray(b, dtype=float)))

    @property
    def s(self) -> int:
        return len(self.c)

    @cached_property
    def c_arr(self) -> np.ndarray:
        return _readonly(np.array(self.c))

    @cached_property
    def A_arr(self) -> np.ndarray:
        return _readonly(np.array(self.A).reshape(self.s, self.s))

    @cached_property
    def b_arr(self) -> np.ndarray:
        return _readonly(np.array(self.b))

    def with_weights(self, b, name: str | None = None) -> "Tableau":
        return Tableau(name or self.name, self.c, self.A, tuple(b))

    def renamed(self, name: str) -> "Tableau":
        return Tableau(name, self.c, self.A, self.b)


@dataclass(frozen=True)
class EmbeddedTableau:
    """Tableau with a second (usually lower order) weight vector.

    ``base.b`` propagates the solution; ``dt * sum((b - b_tilde) * k)`` is the
    error estimate.
    """

    base: Tableau
    b_tilde: tuple[float, ...]
    order_high: int
    order_low: int

    def __post_init__(self):
        bt = _as_float_tuple(self.b_tilde, "b_tilde")
        if len(bt) != self.base.s:
            raise TableauError(f"len(b_tilde)={len(bt)} does not match s={self.base.s}")
        if not all(math.isfinite(x) for x in bt):
            raise TableauError("b_tilde entries must be finite")
        if not (self.order_high >= self.order_low >= 1):
            raise TableauError("orders must satisfy order_high >= order_low >= 1")
        object.__setattr__(self, "b_tilde", bt)

    name = property(lambda self: self.base.name)
    s = property(lambda self: self.base.s)
    c = property(lambda self: self.base.c)
    A = property(lambda self: self.base.A)
    b = property(lambda self: self.base.b)
    c_arr = property(lambda self: self.base.c_arr)
    A_arr = property(lambda self: self.base.A_arr)
    b_arr = property(lambda self: self.base.b_arr)

    @cached_property
    def b_tilde_arr(self) -> np.ndarray:
        return _readonly(np.array(self.b_tilde))

    @property
    def high(self) -> Tableau:
        return self.base

    @property
    def low(self) -> Tableau:
        return self.base.with_weights(self.b_tilde, name=self.base.name + "~")

    @property
    def error_weights(self) -> np.ndarray:
        return self.b_arr - self.b_tilde_arr


@dataclass(frozen=True)
class PartitionedTableau:
    """Pair of tableaus sampling the same stage times.

    ``left`` advances the stiff variables, ``right`` the non-stiff ones.
    """

    left: Tableau
    right: Tableau
    name: str = field(default="")

    def __post_init__(self):
        if self.left.s != self.right.s:
            raise TableauError(
                f"partitioned parts need equal stage counts ({self.left.s} != {self.right.s})"
            )
        if self.left.c != self.right.c:
            raise TableauError("partitioned parts must share the node vector c")
        if not self.name:
            object.__setattr__(self, "name", self.left.name)

    @property
    def s(self) -> int:
        return self.left.s


AnyTableau = Union[Tableau, EmbeddedTableau, PartitionedTableau]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PiParams:
    """Projective integration parameters.

    ``K + 1`` inner forward Euler steps of relative size ``lam = dt_inner / dt``.
    """

    K: int
    lam: float

    def __post_init__(self):
        if isinstance(self.K, bool) or int(self.K) != self.K or self.K < 0:
            raise ParameterError(f"K must be a non-negative integer, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0.0:
            raise ParameterError(f"lam must be positive, got {self.lam!r}")
        if (self.K + 1) * lam > 1.0 + 1e-12:
            raise ParameterError(
                f"(K+1)*lam = {(self.K + 1) * lam!r} exceeds 1: inner steps do not fit in the macro step"
            )
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of the consistency and low-order conditions.

    ``order2_residual`` is signed (``sum(b*c) - 1/2``); the other entries are
    absolute values. ``flags`` names every checked condition whose residual
    exceeds the tolerance, e.g. ``"consistency[4]"`` or ``"order1"``.
    """

    name: str
    consistency_residuals: tuple[float, ...]
    order1_residual: float
    order2_residual: float
    flags: tuple[str, ...]
    tol: float
    order: int

    @property
    def ok(self) -> bool:
        return not self.flags

    def lines(self) -> list[str]:
        out = [f"{self.name}: s={len(self.consistency_residuals)} tol={self.tol:g} checked-order={self.order}"]
        worst = max(self.consistency_residuals)
        out.append(f"  max consistency residual = {worst:.3e}")
        out.append(f"  order1 residual |sum b - 1| = {self.order1_residual:.3e}")
        out.append(f"  order2 residual sum b c - 1/2 = {self.order2_residual:+.3e}")
        out.append("  flags: " + (", ".join(self.flags) if self.flags else "none"))
        return out


def validate(t: Tableau, tol: float = DEFAULT_TOL, order: int = 1) -> ValidationReport:
    """Evaluate the row-sum, ``sum(b) = 1`` and ``sum(b c) = 1/2`` conditions.

    All three residuals are always reported. Flags are raised for consistency
    and, up to ``order``, for the accuracy conditions; the default ``order=1``
    matches the formal order every projective scheme is guaranteed to have.
    """
    if tol < 0:
        raise ParameterError("tol must be non-negative")
    if order not in (0, 1, 2):
        raise ParameterError("order must be 0, 1 or 2")
    if isinstance(t, EmbeddedTableau):
        t = t.base
    if not isinstance(t, Tableau):
        raise TableauError(f"expected a Tableau, got {type(t).__name__}")
    # Tableau construction already guarantees the shape; re-check defensively
    # since callers may hand in duck-typed objects.
    if len(t.A) != t.s or len(t.b) != t.s:
        raise TableauError("dimension mismatch")
    cons = tuple(abs(math.fsum(t.A[i]) - t.c[i]) for i in range(t.s))
    r1 = abs(math.fsum(t.b) - 1.0)
    r2 = math.fsum(bj * cj for bj, cj in zip(t.b, t.c)) - 0.5
    flags = [f"consistency[{i}]" for i, r in enumerate(cons) if r > tol]
    if order >= 1 and r1 > tol:
        flags.append("order1")
    if order >= 2 and abs(r2) > tol:
        flags.append("order2")
    return ValidationReport(t.name, cons, r1, r2, tuple(flags), tol, order)


def validate_all(t: AnyTableau, tol: float = DEFAULT_TOL, order: int = 1) -> dict[str, ValidationReport]:
    """Validate every weight set of a (possibly embedded or partitioned) tableau."""
    if isinstance(t, Tableau):
        return {"b": validate(t, tol, order)}
    if isinstance(t, EmbeddedTableau):
        return {
            "b": validate(t.base, tol, order),
            "b_tilde": validate(t.low, tol, order),
        }
    if isinstance(t, PartitionedTableau):
        return {"left": validate(t.left, tol, order), "right": validate(t.right, tol, order)}
    raise TableauError(f"cannot validate {type(t).__name__}")


def order2_residual_closed_form(p: PiParams) -> float:
    """``sum(b c) - 1/2`` of any PRK scheme built on a second-order outer method."""
    K, lam = p.K, p.lam
    return (lam**2 * (K**2 + K) / 2 + (1 - (K + 1) * lam) * K * lam
            + (1 - (K + 1) * lam) / 2 - 0.5)


# -- serialization ---------------------------------------------------------


def _tableau_dict(t: Tableau) -> dict:
    return {"name": t.name, "s": t.s, "c": list(t.c), "A": [list(r) for r in t.A], "b": list(t.b)}


def to_dict(t: AnyTableau) -> dict:
    if isinstance(t, Tableau):
        return _tableau_dict(t)
    if isinstance(t, EmbeddedTableau):
        d = _tableau_dict(t.base)
        d["b_tilde"] = list(t.b_tilde)
        d["orders"] = [t.order_high, t.order_low]
        return d
    if isinstance(t, PartitionedTableau):
        return {"name": t.name, "left": _tableau_dict(t.left), "right": _tableau_dict(t.right)}
    raise TableauError(f"cannot serialize {type(t).__name__}")


def to_json(t: AnyTableau, indent: int | None = None) -> str:
    """Serialize losslessly; floats are written with their round-trip repr."""
    return json.dumps(to_dict(t), indent=indent, allow_nan=False)


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise TableauParseError(f"missing field {key!r} in {where}", field_name=key)
    return d[key]


def _tableau_from_dict(d: dict, where: str = "tableau") -> Tableau:
    if not isinstance(d, dict):
        raise TableauParseError(f"{where} must be a JSON object")
    name = _require(d, "name", where)
    s = _require(d, "s", where)
    c = _require(d, "c", where)
    A = _require(d, "A", where)
    b = _require(d, "b", where)
    try:
        t = Tableau(str(name), c, A, b)
    except TableauError as exc:
        raise TableauParseError(f"invalid {where}: {exc}") from exc
    if s != t.s:
        raise TableauParseError(f"field 's'={s!r} disagrees with len(c)={t.s} in {where}", field_name="s")
    return t


def from_dict(d: dict) -> AnyTableau:
    if not isinstance(d, dict):
        raise TableauParseError("top level must be a JSON object")
    if "left" in d or "right" in d:
        left = _tableau_from_dict(_require(d, "left", "partitioned tableau"), "left")
        right = _tableau_from_dict(_require(d, "right", "partitioned tableau"), "right")
        try:
            return PartitionedTableau(left, right, str(d.get("name", left.name)))
        except TableauError as exc:
            raise TableauParseError(str(exc)) from exc
    base = _tableau_from_dict(d)
    if "b_tilde" in d:
        orders = d.get("orders", [1, 1])
        try:
            return EmbeddedTableau(base, d["b_tilde"], int(orders[0]), int(orders[1]))
        except (TableauError, TypeError, IndexError, ValueError) as exc:
            raise TableauParseError(f"invalid embedded tableau: {exc}") from exc
    return base


def from_json(text: str) -> AnyTableau:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableauParseError(exc.msg, pos=exc.pos) from exc
    return from_dict(d)
