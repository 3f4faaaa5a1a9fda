"""Closed axis-aligned boxes, grid partitions, and refinement algebra.

All types are immutable after construction and safe to share across
concurrent workers. Breakpoint equality is exact floating-point equality;
the refinement lattice is therefore exact as well.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

# split_axis rejects points closer than this (relative to the side length)
# to an existing breakpoint, to keep near-degenerate cells out of the lattice.
MIN_RELATIVE_GAP = 1e-12


@dataclass(frozen=True)
class Rectangle:
    """Closed box [lower_1, upper_1] x ... x [lower_n, upper_n].

    Degenerate sides (lower_k == upper_k) are allowed and give volume zero.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) == 0 or len(lo) != len(hi):
            raise ValueError("lower and upper must have equal, nonzero length")
        for k, (a, b) in enumerate(zip(lo, hi)):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError(f"axis {k}: coordinates must be finite")
            if a > b:
                raise ValueError(f"axis {k}: lower bound {a} exceeds upper bound {b}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        """Product of the side lengths; zero iff some side is degenerate."""
        v = 1.0
        for a, b in zip(self.lower, self.upper):
            v *= b - a
        return v

    @property
    def longest_side(self) -> float:
        return max(b - a for a, b in zip(self.lower, self.upper))

    @property
    def diameter_bound(self) -> float:
        """sqrt(n) * longest_side, an upper bound on the distance between
        any two points of the box."""
        return math.sqrt(self.dim) * self.longest_side

    @property
    def center(self) -> tuple[float, ...]:
        return tuple((a + b) / 2.0 for a, b in zip(self.lower, self.upper))

    def side(self, axis: int) -> float:
        return self.upper[axis] - self.lower[axis]

    def contains(self, point: Sequence[float]) -> bool:
        if len(point) != self.dim:
            raise ValueError("point dimension mismatch")
        return all(a <= x <= b for a, x, b in zip(self.lower, point, self.upper))

    def overlap_volume(self, other: "Rectangle") -> float:
        """Volume of the intersection with ``other`` (0 if they barely touch)."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        v = 1.0
        for a, b, c, d in zip(self.lower, self.upper, other.lower, other.upper):
            w = min(b, d) - max(a, c)
            if w <= 0.0:
                return 0.0
            v *= w
        return v

    def strictly_inside(self, outer: "Rectangle") -> bool:
        """True iff this box lies in the interior of ``outer``."""
        if outer.dim != self.dim:
            raise ValueError("dimension mismatch")
        return all(
            oa < a and b < ob
            for a, b, oa, ob in zip(self.lower, self.upper, outer.lower, outer.upper)
        )

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_dict(cls, data: dict) -> "Rectangle":
        return cls(tuple(data["lower"]), tuple(data["upper"]))


@dataclass(frozen=True)
class MultiIndex:
    """Identifies one sub-rectangle of a grid; ``indices[k]`` is 0-based per axis."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))


@dataclass(frozen=True)
class GridPartition:
    """Per-axis sorted breakpoints; first/last per axis recover the parent box."""

    axes: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        axes = tuple(tuple(float(x) for x in axis) for axis in self.axes)
        if not axes:
            raise ValueError("a partition needs at least one axis")
        for k, axis in enumerate(axes):
            if len(axis) < 2:
                raise ValueError(f"axis {k}: needs at least two breakpoints")
            for x in axis:
                if not math.isfinite(x):
                    raise ValueError(f"axis {k}: breakpoints must be finite")
            if any(a >= b for a, b in zip(axis, axis[1:])):
                raise ValueError(f"axis {k}: breakpoints must be strictly increasing")
        object.__setattr__(self, "axes", axes)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def rect(self) -> Rectangle:
        return Rectangle(
            tuple(axis[0] for axis in self.axes),
            tuple(axis[-1] for axis in self.axes),
        )

    @property
    def cells_per_axis(self) -> tuple[int, ...]:
        return tuple(len(axis) - 1 for axis in self.axes)

    @property
    def cell_count(self) -> int:
        return math.prod(self.cells_per_axis)

    def cell(self, index: MultiIndex) -> Rectangle:
        if len(index.indices) != self.dim:
            raise ValueError("index dimension mismatch")
        lo = []
        hi = []
        for k, j in enumerate(index.indices):
            if not 0 <= j < len(self.axes[k]) - 1:
                raise ValueError(f"axis {k}: cell index {j} out of range")
            lo.append(self.axes[k][j])
            hi.append(self.axes[k][j + 1])
        return Rectangle(tuple(lo), tuple(hi))

    def to_dict(self) -> dict:
        return {"axes": [list(axis) for axis in self.axes]}

    @classmethod
    def from_dict(cls, data: dict) -> "GridPartition":
        return cls(tuple(tuple(axis) for axis in data["axes"]))


def uniform_partition(rect: Rectangle, counts: Sequence[int]) -> GridPartition:
    """Equal-width grid with ``counts[k]`` cells on axis k; endpoints exact."""
    if len(counts) != rect.dim:
        raise ValueError("counts length must match the rectangle dimension")
    axes = []
    for k, m in enumerate(counts):
        m = int(m)
        if m < 1:
            raise ValueError(f"axis {k}: cell count must be at least 1")
        a, b = rect.lower[k], rect.upper[k]
        if a == b:
            raise ValueError(f"axis {k}: cannot partition a degenerate side")
        pts = [a + (b - a) * i / m for i in range(m + 1)]
        pts[0], pts[-1] = a, b
        axes.append(tuple(pts))
    return GridPartition(tuple(axes))


def subrectangles(p: GridPartition) -> Iterator[tuple[MultiIndex, Rectangle]]:
    """All cells in lexicographic MultiIndex order, axis 0 varying slowest.

    The cells cover the parent rectangle and their volumes sum to its volume.
    """
    ranges = [range(m) for m in p.cells_per_axis]
    for combo in itertools.product(*ranges):
        idx = MultiIndex(combo)
        yield idx, p.cell(idx)


def _require_same_parent(p: GridPartition, q: GridPartition) -> None:
    if p.dim != q.dim or p.rect != q.rect:
        raise ValueError("partitions cover different parent rectangles")


def common_refinement(p: GridPartition, q: GridPartition) -> GridPartition:
    """Axis-wise union of breakpoints; refines both inputs."""
    _require_same_parent(p, q)
    return GridPartition(
        tuple(tuple(sorted(set(pa) | set(qa))) for pa, qa in zip(p.axes, q.axes))
    )


def is_refinement(fine: GridPartition, coarse: GridPartition) -> bool:
    """True iff every breakpoint of ``coarse`` appears in ``fine``, per axis."""
    _require_same_parent(fine, coarse)
    return all(set(ca) <= set(fa) for fa, ca in zip(fine.axes, coarse.axes))


def split_axis(p: GridPartition, axis: int, point: float) -> GridPartition:
    """Insert ``point`` as a new breakpoint on ``axis``.

    The point must lie strictly inside the axis range and keep a relative gap
    of at least MIN_RELATIVE_GAP to every existing breakpoint.
    """
    if not 0 <= axis < p.dim:
        raise ValueError(f"axis {axis} out of range")
    pts = p.axes[axis]
    a, b = pts[0], pts[-1]
    point = float(point)
    if not a < point < b:
        raise ValueError(f"split point {point} is not strictly inside ({a}, {b})")
    gap = MIN_RELATIVE_GAP * (b - a)
    for x in pts:
        if abs(point - x) <= gap:
            raise ValueError(f"split point {point} coincides with breakpoint {x}")
    new_axes = list(p.axes)
    new_axes[axis] = tuple(sorted(pts + (point,)))
    return GridPartition(tuple(new_axes))
