"""Sampled pointwise oscillation, discontinuity scanning, and cover volumes.

Oscillation here is the sampled quantity max - min of f over a deterministic
low-discrepancy point set in ball(x, delta) intersected with the domain
rectangle; it underestimates the true oscillation. The scan flags grid cells
whose sampled oscillation reaches a threshold and reports their total volume,
an upper bound on the volume of any cover built from those cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bounds import PointFunction, sample_enclosure
from .errors import UnboundedFunctionError
from .geometry import MultiIndex, Rectangle, subrectangles, uniform_partition
from .util import CompensatedSum, ordered_map

_PRIMES = (2, 3, 5, 7, 11, 13)

DEFAULT_SAMPLE_COUNT = 64
DELTA_LEVELS = 20


@dataclass(frozen=True)
class OscillationEstimate:
    point: tuple[float, ...]
    delta: float
    osc: float
    samples: int


@dataclass(frozen=True)
class OscillationProfile:
    """Estimates at strictly decreasing deltas with nested sample sets, so the
    sampled oscillation is monotone non-decreasing in delta exactly."""

    estimates: tuple[OscillationEstimate, ...]

    @property
    def limit(self) -> float:
        return self.estimates[-1].osc


@dataclass(frozen=True)
class DiscontinuityReport:
    threshold: float
    flagged_indices: tuple[MultiIndex, ...]
    flagged_cells: tuple[Rectangle, ...]
    cover_volume: float
    grid: tuple[int, ...]
    rect: Rectangle


def _halton(index: int, base: int) -> float:
    result = 0.0
    f = 1.0
    i = index
    while i > 0:
        f /= base
        result += f * (i % base)
        i //= base
    return result


def _ball_points(
    x: tuple[float, ...], delta: float, domain: Rectangle, count: int, offset: int
) -> list[tuple[float, ...]]:
    """Deterministic points of ball(x, delta) in the subset topology of the
    domain rectangle; starts the Halton sequence at ``offset``."""
    n = len(x)
    lo = [max(c - delta, a) for c, a in zip(x, domain.lower)]
    hi = [min(c + delta, b) for c, b in zip(x, domain.upper)]
    points: list[tuple[float, ...]] = []
    index = offset
    attempts = 0
    max_attempts = 200 * count + 200
    while len(points) < count and attempts < max_attempts:
        p = tuple(
            a + (b - a) * _halton(index, _PRIMES[k]) for k, (a, b) in enumerate(zip(lo, hi))
        )
        index += 1
        attempts += 1
        if math.dist(p, x) <= delta:
            points.append(p)
    return points


def oscillation_at_scale(
    f: PointFunction,
    x: Sequence[float],
    delta: float,
    domain: Rectangle,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> OscillationEstimate:
    """max - min of f over sampled points of ball(x, delta) within the domain
    rectangle, including x itself. Underestimates the true oscillation."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if sample_count < 2:
        raise ValueError("need at least 2 samples")
    point = tuple(float(c) for c in x)
    if not domain.contains(point):
        raise ValueError("x must lie in the domain rectangle")
    pts = [point] + _ball_points(point, delta, domain, sample_count - 1, 1)
    lo = math.inf
    hi = -math.inf
    for p in pts:
        v = f(p)
        if not math.isfinite(v):
            raise UnboundedFunctionError(f"non-finite value {v} at sample {p}")
        lo = min(lo, v)
        hi = max(hi, v)
    return OscillationEstimate(point, float(delta), hi - lo, len(pts))


def oscillation_limit(
    f: PointFunction,
    x: Sequence[float],
    deltas: Sequence[float],
    domain: Rectangle,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> OscillationProfile:
    """Estimates over a strictly decreasing delta sequence.

    The sample set for each delta includes the draws for all smaller deltas
    (they lie inside the larger ball), so the recorded profile is monotone
    non-decreasing in delta as computed. The last entry is the limit proxy.
    """
    ds = [float(d) for d in deltas]
    if not ds or any(d <= 0.0 for d in ds):
        raise ValueError("deltas must be positive")
    if any(d1 <= d2 for d1, d2 in zip(ds, ds[1:])):
        raise ValueError("deltas must be strictly decreasing")
    point = tuple(float(c) for c in x)
    if not domain.contains(point):
        raise ValueError("x must lie in the domain rectangle")

    per_delta = []
    for level, d in enumerate(ds):
        draws = _ball_points(point, d, domain, sample_count - 1, 1 + level * sample_count)
        per_delta.append(draws)

    estimates: list[OscillationEstimate] = []
    running: list[tuple[float, ...]] = [point]
    for level in range(len(ds) - 1, -1, -1):
        running = running + per_delta[level]
        lo = math.inf
        hi = -math.inf
        for p in running:
            v = f(p)
            if not math.isfinite(v):
                raise UnboundedFunctionError(f"non-finite value {v} at sample {p}")
            lo = min(lo, v)
            hi = max(hi, v)
        estimates.append(OscillationEstimate(point, ds[level], hi - lo, len(running)))
    estimates.reverse()
    return OscillationProfile(tuple(estimates))


def default_deltas(domain: Rectangle, levels: int = DELTA_LEVELS) -> tuple[float, ...]:
    """Geometric delta sequence longest_side/10 * 2^-k, k = 0..levels."""
    d0 = domain.longest_side / 10.0
    return tuple(d0 * 2.0 ** (-k) for k in range(levels + 1))


def discontinuity_scan(
    f: PointFunction,
    rect: Rectangle,
    threshold: float,
    grid_counts: Sequence[int],
    sample_grid: int = 3,
    workers: int = 1,
) -> DiscontinuityReport:
    """Partition ``rect`` uniformly and flag every cell whose sampled
    oscillation (max - min over the cell's tensor sample grid) reaches
    ``threshold``; the flagged volume is a cover-volume upper bound for the
    sampled part of the threshold discontinuity set."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    partition = uniform_partition(rect, grid_counts)
    pairs = list(subrectangles(partition))

    def cell_osc(pair):
        _, cell = pair
        enc = sample_enclosure(f, cell, sample_grid)
        return enc.hi - enc.lo

    oscs = ordered_map(cell_osc, pairs, workers)
    flagged_idx: list[MultiIndex] = []
    flagged_cells: list[Rectangle] = []
    vol = CompensatedSum()
    for (idx, cell), osc in zip(pairs, oscs):
        if osc >= threshold:
            flagged_idx.append(idx)
            flagged_cells.append(cell)
            vol.add(cell.volume)
    return DiscontinuityReport(
        threshold=float(threshold),
        flagged_indices=tuple(flagged_idx),
        flagged_cells=tuple(flagged_cells),
        cover_volume=vol.value,
        grid=tuple(int(g) for g in grid_counts),
        rect=rect,
    )


def cover_volume(cover: Sequence[Rectangle]) -> float:
    """Total volume of a list of rectangles: an upper bound on the outer
    measure of any set contained in their union."""
    acc = CompensatedSum()
    for r in cover:
        acc.add(r.volume)
    return acc.value
