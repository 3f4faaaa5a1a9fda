"""Iterated integration: an n-dimensional integral as nested 1-D adaptive
quadratures over a chosen axis order, plus a crosscheck against the direct
bracketing engine.

Tolerance budget per level: the outer 1-D integral receives tol/2 and every
inner evaluation receives (tol/2) / max(1, outer length), so the accumulated
inner error stays within tol/2.

Sections that fail to converge raise SectionFailureError naming the outer
point. The 1-D driver keeps such failures at interval endpoints from being
fatal (it switches to open midpoint sums), which is what makes integrands
with an isolated singular corner evaluable in iterated mode even though the
direct bracketing engine rejects them as unbounded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from . import expr as expr_mod
from .darboux import DEFAULT_CELL_BUDGET, adaptive_integrate
from .errors import SectionFailureError
from .geometry import Rectangle
from .riemann1d import DEFAULT_MAX_INTERVALS, adaptive_1d

PointFunction = Callable[[Sequence[float]], float]

MAX_DIM = 6


@dataclass(frozen=True)
class AxisOrder:
    """Permutation of the axes 0..n-1, outermost first."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(a) for a in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"{order} is not a permutation of 0..{len(order) - 1}")
        object.__setattr__(self, "order", order)

    @property
    def dim(self) -> int:
        return len(self.order)

    @classmethod
    def from_text(cls, text: str) -> "AxisOrder":
        """Parse a 1-based permutation string such as '2,1'."""
        try:
            axes = tuple(int(part) - 1 for part in text.split(","))
        except ValueError:
            raise ValueError(f"cannot parse axis order {text!r}") from None
        return cls(axes)

    def to_text(self) -> str:
        return ",".join(str(a + 1) for a in self.order)


@dataclass(frozen=True)
class SectionFunction:
    """A base function with some axes frozen at fixed values; calling it with
    the free coordinates evaluates the base at the assembled point."""

    base: PointFunction
    fixed_axes: tuple[int, ...]
    fixed_values: tuple[float, ...]
    free_axes: tuple[int, ...]

    def __call__(self, free_values: Sequence[float]) -> float:
        if len(free_values) != len(self.free_axes):
            raise ValueError("free coordinate count mismatch")
        point = [0.0] * (len(self.fixed_axes) + len(self.free_axes))
        for ax, v in zip(self.fixed_axes, self.fixed_values):
            point[ax] = v
        for ax, v in zip(self.free_axes, free_values):
            point[ax] = v
        return self.base(point)


@dataclass(frozen=True)
class IteratedResult:
    value: float
    error: float
    converged: bool


@dataclass(frozen=True)
class CrosscheckRow:
    method: str
    value: float
    tolerance: float
    converged: bool


@dataclass(frozen=True)
class CrosscheckReport:
    rows: tuple[CrosscheckRow, ...]
    max_discrepancy: float
    passed: bool


def _integrate_level(
    f: PointFunction,
    rect: Rectangle,
    remaining: tuple[int, ...],
    fixed_axes: tuple[int, ...],
    fixed_values: tuple[float, ...],
    tol: float,
    max_intervals: int,
) -> IteratedResult:
    axis = remaining[0]
    a, b = rect.lower[axis], rect.upper[axis]

    if len(remaining) == 1:
        section = SectionFunction(f, fixed_axes, fixed_values, (axis,))
        res = adaptive_1d(lambda t: section((t,)), a, b, tol, max_intervals)
        return IteratedResult(res.value, res.error, res.converged)

    outer_tol = tol / 2.0
    inner_tol = (tol / 2.0) / max(1.0, b - a)

    def g(t: float) -> float:
        inner = _integrate_level(
            f, rect, remaining[1:], fixed_axes + (axis,), fixed_values + (t,),
            inner_tol, max_intervals,
        )
        if not inner.converged:
            raise SectionFailureError(
                fixed_values + (t,), f"error estimate {inner.error}"
            )
        return inner.value

    res = adaptive_1d(g, a, b, outer_tol, max_intervals)
    return IteratedResult(res.value, res.error + tol / 2.0, res.converged)


def iterated_integrate(
    f: PointFunction,
    rect: Rectangle,
    order: Optional[Union[AxisOrder, Sequence[int]]] = None,
    tol: float = 1e-6,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
) -> IteratedResult:
    """Integrate f over ``rect`` by nested 1-D adaptive quadrature, axes
    taken outermost-first from ``order`` (default: axis 0 outermost)."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if rect.dim > MAX_DIM:
        raise ValueError(f"dimension {rect.dim} exceeds the supported maximum {MAX_DIM}")
    if order is None:
        order = AxisOrder(tuple(range(rect.dim)))
    elif not isinstance(order, AxisOrder):
        order = AxisOrder(tuple(order))
    if order.dim != rect.dim:
        raise ValueError("axis order dimension mismatch")
    return _integrate_level(f, rect, order.order, (), (), float(tol), max_intervals)


def inner_section_integral(
    f: PointFunction,
    outer_point: Sequence[float],
    inner_rect: Rectangle,
    tol: float,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
) -> float:
    """Integral of the section y -> f(outer_point, y) over ``inner_rect``.

    The outer coordinates occupy the leading axes of f. Raises
    SectionFailureError naming the outer point if the section integral does
    not converge.
    """
    outer = tuple(float(v) for v in outer_point)
    k = len(outer)
    rect = Rectangle(outer + inner_rect.lower, outer + inner_rect.upper)
    remaining = tuple(range(k, k + inner_rect.dim))
    res = _integrate_level(f, rect, remaining, tuple(range(k)), outer, tol, max_intervals)
    if not res.converged:
        raise SectionFailureError(outer, f"error estimate {res.error}")
    return res.value


def fubini_crosscheck(
    e: Union[expr_mod.Expr, str],
    rect: Rectangle,
    tol: float,
    max_cells: int = DEFAULT_CELL_BUDGET,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
    workers: int = 1,
) -> CrosscheckReport:
    """Evaluate every axis order (n <= 3) plus the direct Darboux bracket and
    compare: PASS iff every pair agrees within the sum of its tolerances."""
    if isinstance(e, str):
        e = expr_mod.parse(e, rect.dim)
    if rect.dim > 3:
        raise ValueError("crosscheck supports dimensions 1..3")

    f = expr_mod.as_callable(e)
    rows: list[CrosscheckRow] = []
    for perm in sorted(itertools.permutations(range(rect.dim))):
        label = "iterated[" + ",".join(str(a + 1) for a in perm) + "]"
        try:
            res = iterated_integrate(f, rect, AxisOrder(perm), tol, max_intervals)
        except Exception as exc:
            raise RuntimeError(f"{label}: {exc}") from exc
        rows.append(CrosscheckRow(label, res.value, res.error, res.converged))

    try:
        direct = adaptive_integrate(
            expr_mod.IntervalOracle(e), rect, tol, max_cells, workers
        )
    except Exception as exc:
        raise RuntimeError(f"darboux: {exc}") from exc
    rows.append(
        CrosscheckRow("darboux", direct.midpoint, direct.width / 2.0, direct.converged)
    )

    max_disc = 0.0
    passed = True
    for r1, r2 in itertools.combinations(rows, 2):
        disc = abs(r1.value - r2.value)
        max_disc = max(max_disc, disc)
        if disc > r1.tolerance + r2.tolerance:
            passed = False
    return CrosscheckReport(tuple(rows), max_disc, passed)
