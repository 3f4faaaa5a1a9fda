"""One-dimensional tagged Riemann sums, Darboux sums, mesh norms,
right-endpoint series evaluation, and the adaptive quadrature used for
iterated integration.

The adaptive routine doubles the interval count per level, maintaining left
and right endpoint sums; the reported value is their mean (the trapezoid
value) and the error proxy is the change between successive levels. When an
endpoint cannot be evaluated (domain violation, or a non-convergent inner
section in iterated integration), it falls back to open midpoint sums that
never touch the endpoints, with early abort on geometric divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .bounds import BoundOracle
from .errors import SectionFailureError, UnboundedFunctionError
from .geometry import Rectangle
from .util import CompensatedSum

DEFAULT_MAX_INTERVALS = 2 ** 16

ScalarFunction = Callable[[float], float]

# Endpoint probing failures that switch adaptive_1d into open (midpoint) mode.
_ENDPOINT_FAILURES = (ArithmeticError, ValueError, SectionFailureError)


@dataclass(frozen=True)
class TaggedPartition:
    """Sorted points a = x_0 < ... < x_m = b with one tag per subinterval."""

    points: tuple[float, ...]
    tags: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        tags = tuple(float(c) for c in self.tags)
        if len(pts) < 2:
            raise ValueError("need at least two partition points")
        if any(not math.isfinite(x) for x in pts + tags):
            raise ValueError("points and tags must be finite")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("points must be strictly increasing")
        if len(tags) != len(pts) - 1:
            raise ValueError("need exactly one tag per subinterval")
        for k, c in enumerate(tags):
            if not pts[k] <= c <= pts[k + 1]:
                raise ValueError(f"tag {c} outside subinterval {k}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "tags", tags)

    @classmethod
    def uniform(cls, a: float, b: float, n: int, rule: str = "right") -> "TaggedPartition":
        if n < 1:
            raise ValueError("need at least one subinterval")
        pts = [a + (b - a) * i / n for i in range(n + 1)]
        pts[0], pts[-1] = a, b
        if rule == "right":
            tags = pts[1:]
        elif rule == "left":
            tags = pts[:-1]
        elif rule == "mid":
            tags = [(lo + hi) / 2.0 for lo, hi in zip(pts, pts[1:])]
        else:
            raise ValueError(f"unknown tag rule {rule!r}")
        return cls(tuple(pts), tuple(tags))


@dataclass(frozen=True)
class Quad1DResult:
    value: float
    error: float
    converged: bool
    intervals: int


@dataclass(frozen=True)
class SeriesLimitResult:
    """Partial right-endpoint sums and the extrapolated limit they approach."""

    integrand: str
    a: float
    b: float
    n_values: tuple[int, ...]
    partial_sums: tuple[float, ...]
    limit_estimate: float


def mesh_norm(p: TaggedPartition) -> float:
    """Length of the longest subinterval."""
    return max(b - a for a, b in zip(p.points, p.points[1:]))


def _finite(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise UnboundedFunctionError(f"non-finite value {value} at {where}")
    return value


def riemann_sum(f: ScalarFunction, p: TaggedPartition) -> float:
    """Sum of f(tag_k) * (x_k - x_{k-1}), left to right, compensated."""
    acc = CompensatedSum()
    for a, b, c in zip(p.points, p.points[1:], p.tags):
        acc.add(_finite(f(c), f"tag {c}") * (b - a))
    return acc.value


def right_endpoint_sum(f: ScalarFunction, a: float, b: float, n: int) -> float:
    """Sum over k=1..n of f(a + k(b-a)/n) * (b-a)/n."""
    if not a < b:
        raise ValueError("need a < b")
    if n < 1:
        raise ValueError("need n >= 1")
    h = (b - a) / n
    acc = CompensatedSum()
    for k in range(1, n + 1):
        x = a + k * (b - a) / n
        acc.add(_finite(f(x), f"x={x}") * h)
    return acc.value


def darboux_sums_1d(oracle: BoundOracle, points: Sequence[float]) -> tuple[float, float]:
    """(lower, upper) Darboux sums for a 1-D partition given by ``points``.

    Any Riemann sum over the same points, with arbitrary tags, lies between
    them when the oracle is rigorous.
    """
    pts = [float(x) for x in points]
    if len(pts) < 2 or any(a >= b for a, b in zip(pts, pts[1:])):
        raise ValueError("points must be strictly increasing with length >= 2")
    lo_acc = CompensatedSum()
    hi_acc = CompensatedSum()
    for a, b in zip(pts, pts[1:]):
        enc = oracle(Rectangle((a,), (b,)))
        if not enc.is_finite():
            raise UnboundedFunctionError(f"non-finite enclosure on [{a}, {b}]")
        lo_acc.add(enc.lo * (b - a))
        hi_acc.add(enc.hi * (b - a))
    return lo_acc.value, hi_acc.value


def _closed_quadrature(
    f: ScalarFunction, a: float, b: float, fa: float, fb: float,
    tol: float, max_intervals: int,
) -> Quad1DResult:
    span = b - a
    left = fa * span
    right = fb * span
    value = 0.5 * (left + right)
    n = 1
    error = math.inf
    consecutive = 0
    while 2 * n <= max_intervals:
        h = span / (2 * n)
        mids = CompensatedSum()
        for j in range(n):
            x = a + (2 * j + 1) * h
            mids.add(_finite(f(x), f"x={x}"))
        msum = mids.value * h
        left = 0.5 * left + msum
        right = 0.5 * right + msum
        n *= 2
        new_value = 0.5 * (left + right)
        error = abs(new_value - value)
        value = new_value
        if error <= tol and n >= 4:
            consecutive += 1
            if consecutive >= 2:
                return Quad1DResult(value, error, True, n)
        else:
            consecutive = 0
    return Quad1DResult(value, error, False, n)


def _open_quadrature(
    f: ScalarFunction, a: float, b: float, tol: float, max_intervals: int
) -> Quad1DResult:
    span = b - a
    value = math.nan
    error = math.inf
    diffs: list[float] = []
    n = 1
    level = 0
    while n <= max_intervals:
        h = span / n
        acc = CompensatedSum()
        for j in range(n):
            x = a + (j + 0.5) * h
            acc.add(_finite(f(x), f"x={x}"))
        new_value = acc.value * h
        if level > 0:
            error = abs(new_value - value)
            diffs.append(error)
            if error <= tol and n >= 8 and len(diffs) >= 2 and diffs[-2] <= tol:
                return Quad1DResult(new_value, error, True, n)
            # geometric growth of successive differences means divergence
            if (
                level >= 5
                and error > 10.0 * tol
                and diffs[-1] > 1.5 * diffs[-2]
                and diffs[-2] > 1.5 * diffs[-3]
            ):
                return Quad1DResult(new_value, error, False, n)
        value = new_value
        n *= 2
        level += 1
    return Quad1DResult(value, error, False, n // 2)


def adaptive_1d(
    f: ScalarFunction,
    a: float,
    b: float,
    tol: float,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
) -> Quad1DResult:
    """Adaptive 1-D quadrature with interval halving.

    On convergence the reported error estimate is at most ``tol``. A
    degenerate interval integrates to exactly 0. Failure to evaluate an
    endpoint switches to open midpoint sums so improper-but-convergent
    endpoint behavior is handled; interior evaluation failures propagate.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if a > b:
        raise ValueError("need a <= b")
    if a == b:
        return Quad1DResult(0.0, 0.0, True, 0)
    try:
        fa = _finite(f(a), f"x={a}")
        fb = _finite(f(b), f"x={b}")
    except _ENDPOINT_FAILURES:
        return _open_quadrature(f, a, b, tol, max_intervals)
    return _closed_quadrature(f, a, b, fa, fb, tol, max_intervals)


def series_limit(
    integrand: str, a: float, b: float, n_values: Sequence[int]
) -> SeriesLimitResult:
    """Right-endpoint partial sums S_n for each n, plus a limit estimate by
    Richardson extrapolation (first order in 1/n) on the last two values."""
    from . import expr as expr_mod

    ns = [int(n) for n in n_values]
    if not ns or any(n < 1 for n in ns):
        raise ValueError("n values must be positive")
    if any(m >= n for m, n in zip(ns, ns[1:])):
        raise ValueError("n values must be strictly increasing")
    e = expr_mod.parse(integrand, 1)
    f = lambda x: expr_mod.eval_point(e, (x,))
    partials = tuple(right_endpoint_sum(f, a, b, n) for n in ns)
    if len(ns) >= 2:
        m, n = ns[-2], ns[-1]
        sm, sn = partials[-2], partials[-1]
        limit = sn + (sn - sm) * m / (n - m)
    else:
        limit = partials[-1]
    return SeriesLimitResult(integrand, float(a), float(b), tuple(ns), partials, limit)


def bronstein_product(c: float, n: int) -> tuple[float, float]:
    """The literal product prod_{j=1..n-1} (1 + c^2 - 2c cos(j pi / n)) and
    its closed form (c^(2n) - 1) / (c^2 - 1)."""
    if not c > 1.0:
        raise ValueError("need c > 1")
    if n < 2:
        raise ValueError("need n >= 2")
    product = 1.0
    for j in range(1, n):
        product *= 1.0 + c * c - 2.0 * c * math.cos(j * math.pi / n)
    closed = (c ** (2 * n) - 1.0) / (c * c - 1.0)
    return product, closed


def bronstein_integral(
    a: float, b: float, tol: float, max_intervals: int = DEFAULT_MAX_INTERVALS
) -> Quad1DResult:
    """Integral over [0, pi] of log(a^2 + b^2 - 2ab cos x), which equals
    2 pi log(max(a, b)) for positive a != b."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("need positive a and b")
    if a == b:
        raise ValueError("need a != b (the integrand is singular at 0 otherwise)")

    def integrand(x: float) -> float:
        return math.log(a * a + b * b - 2.0 * a * b * math.cos(x))

    return adaptive_1d(integrand, 0.0, math.pi, tol, max_intervals)
