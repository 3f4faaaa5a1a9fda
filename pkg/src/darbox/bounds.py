"""Bound oracles: procedures mapping a rectangle to an enclosure of a
function's range on it.

Any callable Rectangle -> Enclosure works as an oracle. Oracles carrying a
truthy ``rigorous`` attribute promise that every point value of the function
lies inside the returned enclosure; sampled oracles make no such promise.
Monotonicity under inclusion is NOT part of the contract: an oracle may
return looser bounds for a sub-rectangle than for its parent.

Oracles must be safe to call from multiple workers; everything here is
stateless after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

from .errors import UnboundedFunctionError
from .geometry import Rectangle

PointFunction = Callable[[Sequence[float]], float]
BoundOracle = Callable[[Rectangle], "Enclosure"]

DEFAULT_SAMPLE_GRID = 3


@dataclass(frozen=True)
class Enclosure:
    """Bounds for a function's range on a rectangle: lo <= inf f, sup f <= hi
    when rigorous; sampled min/max otherwise."""

    lo: float
    hi: float
    rigorous: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValueError(f"invalid enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def intersect(self, other: "Enclosure") -> "Enclosure":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("empty intersection")
        return Enclosure(lo, hi, self.rigorous and other.rigorous)


def _check_finite(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise UnboundedFunctionError(f"non-finite value {value} at {where}")
    return value


def _axis_samples(a: float, b: float, count: int) -> list[float]:
    if a == b:
        return [a]
    return [a + (b - a) * i / (count - 1) for i in range(count)]


def sample_enclosure(
    f: PointFunction, rect: Rectangle, grid: int | Sequence[int] = DEFAULT_SAMPLE_GRID
) -> Enclosure:
    """Min/max of f over a tensor sample grid; NOT rigorous.

    ``grid`` points per axis, endpoints included, so all corners are sampled
    and odd counts include the center. The bounds are attained by actual
    evaluations, so they may under-cover the true range.
    """
    counts = [grid] * rect.dim if isinstance(grid, int) else [int(g) for g in grid]
    if len(counts) != rect.dim:
        raise ValueError("grid length must match the rectangle dimension")
    if any(c < 2 for c in counts):
        raise ValueError("need at least 2 samples per axis")
    axes = [
        _axis_samples(a, b, c) for a, b, c in zip(rect.lower, rect.upper, counts)
    ]
    lo = math.inf
    hi = -math.inf
    for point in product(*axes):
        v = f(point)
        _check_finite(v, f"sample {point}")
        lo = min(lo, v)
        hi = max(hi, v)
    return Enclosure(lo, hi, rigorous=False)


def lipschitz_enclosure(f: PointFunction, lipschitz: float, rect: Rectangle) -> Enclosure:
    """f(center) +- L * (diameter bound)/2; rigorous given the caller's
    assertion that ``lipschitz`` really bounds the variation of f on rect."""
    if lipschitz < 0.0:
        raise ValueError("Lipschitz constant must be nonnegative")
    c = rect.center
    fc = _check_finite(f(c), f"center {c}")
    rho = rect.diameter_bound / 2.0
    return Enclosure(fc - lipschitz * rho, fc + lipschitz * rho, rigorous=True)


class SampledOracle:
    """Non-rigorous oracle: tensor-grid sampling, DEFAULT_SAMPLE_GRID per axis."""

    rigorous = False

    def __init__(self, f: PointFunction, grid: int | Sequence[int] = DEFAULT_SAMPLE_GRID):
        self.f = f
        self.grid = grid

    def __call__(self, rect: Rectangle) -> Enclosure:
        return sample_enclosure(self.f, rect, self.grid)


class LipschitzOracle:
    """Rigorous oracle from a caller-asserted Lipschitz constant."""

    rigorous = True

    def __init__(self, f: PointFunction, lipschitz: float):
        if lipschitz < 0.0:
            raise ValueError("Lipschitz constant must be nonnegative")
        self.f = f
        self.lipschitz = lipschitz

    def __call__(self, rect: Rectangle) -> Enclosure:
        return lipschitz_enclosure(self.f, self.lipschitz, rect)


class MockOracle:
    """Scripted oracle: the enclosure of the first region whose rectangle
    meets the query in positive volume, else the default enclosure.

    Useful for functions whose exact cell bounds are known analytically but
    are not expressible as an expression (indicator-style counterexamples).
    """

    rigorous = True

    def __init__(self, regions: Sequence[tuple[Rectangle, Enclosure]], default: Enclosure):
        self.regions = tuple(regions)
        self.default = default

    def __call__(self, rect: Rectangle) -> Enclosure:
        for region, enclosure in self.regions:
            if region.overlap_volume(rect) > 0.0:
                return enclosure
        return self.default


def mock_oracle(
    regions: Sequence[tuple[Rectangle, Enclosure]], default: Enclosure
) -> MockOracle:
    return MockOracle(regions, default)


class SupportOracle:
    """Wraps an oracle for a function known to vanish outside ``support``:
    cells disjoint from the support get the exact enclosure (0, 0)."""

    def __init__(self, inner: BoundOracle, support: Rectangle):
        self.inner = inner
        self.support = support
        self.rigorous = bool(getattr(inner, "rigorous", False))

    def __call__(self, rect: Rectangle) -> Enclosure:
        if self.support.overlap_volume(rect) == 0.0:
            return Enclosure(0.0, 0.0, rigorous=True)
        return self.inner(rect)


class CustomOracle:
    """Adapter giving a plain ``Rectangle -> Enclosure`` callable a rigor flag."""

    def __init__(self, fn: BoundOracle, rigorous: bool = False):
        self.fn = fn
        self.rigorous = rigorous

    def __call__(self, rect: Rectangle) -> Enclosure:
        return self.fn(rect)
