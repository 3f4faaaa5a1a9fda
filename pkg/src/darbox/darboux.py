"""Lower/upper Darboux sums over grid partitions and the adaptive
bracket-refinement engine.

The adaptive engine keeps a worklist of cells scored by
(enclosure width) * (cell volume); the global bracket width is exactly the
sum of these scores. Each round bisects every cell whose score is within a
factor of 2 of the current worst (always including the worst cell) at the
midpoint of its longest axis, lowest axis index on ties. Batching rounds
this way keeps the refinement deterministic and lets an expression oracle
evaluate whole rounds of cells vectorized; the sequence of global brackets
is still nested for rigorous oracles because every child enclosure is
intersected with its parent's.

All reductions run in a fixed order, so results are bit-identical for any
worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .bounds import BoundOracle, Enclosure
from .errors import UnboundedFunctionError
from .geometry import GridPartition, Rectangle, subrectangles
from .util import CompensatedSum, ordered_map

DEFAULT_CELL_BUDGET = 2 ** 20

# Cells scoring at least this fraction of the round's worst score are
# bisected together in one round.
_ROUND_FRACTION = 0.5


@dataclass(frozen=True)
class Bracket:
    """A (lower sum, upper sum) pair; the integral of an integrable function
    lies inside every bracket produced by a rigorous oracle."""

    lower: float
    upper: float
    cells: int
    source: str = ""

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class IntegrateResult:
    bracket: Bracket
    midpoint: float
    converged: bool
    refinements: int
    declared_support: Optional[Rectangle] = None

    @property
    def width(self) -> float:
        return self.bracket.width


def _cell_enclosures(
    oracle: BoundOracle, p: GridPartition, workers: int
) -> tuple[list[Rectangle], list[Enclosure], list[float]]:
    pairs = list(subrectangles(p))
    rects = [rect for _, rect in pairs]
    encs = ordered_map(oracle, rects, workers)
    for rect, enc in zip(rects, encs):
        if not enc.is_finite():
            raise UnboundedFunctionError(
                f"enclosure [{enc.lo}, {enc.hi}] on cell {rect.to_dict()} is not finite"
            )
    vols = [rect.volume for rect in rects]
    return rects, encs, vols


def lower_sum(oracle: BoundOracle, p: GridPartition, workers: int = 1) -> float:
    """Sum of enclosure.lo * volume over cells, in lexicographic cell order
    with compensated accumulation."""
    _, encs, vols = _cell_enclosures(oracle, p, workers)
    acc = CompensatedSum()
    for enc, v in zip(encs, vols):
        acc.add(enc.lo * v)
    return acc.value


def upper_sum(oracle: BoundOracle, p: GridPartition, workers: int = 1) -> float:
    """Dual of lower_sum using enclosure.hi."""
    _, encs, vols = _cell_enclosures(oracle, p, workers)
    acc = CompensatedSum()
    for enc, v in zip(encs, vols):
        acc.add(enc.hi * v)
    return acc.value


def bracket_for_partition(
    oracle: BoundOracle, p: GridPartition, workers: int = 1
) -> Bracket:
    """Lower and upper sums in one pass over the cells."""
    _, encs, vols = _cell_enclosures(oracle, p, workers)
    lo_acc = CompensatedSum()
    hi_acc = CompensatedSum()
    for enc, v in zip(encs, vols):
        lo_acc.add(enc.lo * v)
        hi_acc.add(enc.hi * v)
    lower, upper = lo_acc.value, hi_acc.value
    if getattr(oracle, "rigorous", False) and lower > upper:
        raise ValueError(
            f"inconsistent rigorous oracle: lower sum {lower} exceeds upper sum {upper}"
        )
    source = "grid" + "x".join(str(m) for m in p.cells_per_axis)
    return Bracket(lower, upper, cells=p.cell_count, source=source)


def _batch_evaluator(oracle: BoundOracle, workers: int):
    batch = getattr(oracle, "enclose_batch", None)
    if batch is not None:
        return batch

    def scalar_batch(los: np.ndarray, his: np.ndarray):
        rects = [
            Rectangle(tuple(lo), tuple(hi))
            for lo, hi in zip(los.tolist(), his.tolist())
        ]
        encs = ordered_map(oracle, rects, workers)
        return (
            np.array([e.lo for e in encs], dtype=float),
            np.array([e.hi for e in encs], dtype=float),
        )

    return scalar_batch


def _require_finite(lo: np.ndarray, hi: np.ndarray) -> None:
    if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
        raise UnboundedFunctionError("unbounded: non-finite enclosure on some cell")


def adaptive_integrate(
    oracle: BoundOracle,
    rect: Rectangle,
    tol: float,
    max_cells: int = DEFAULT_CELL_BUDGET,
    workers: int = 1,
    bracket_log: Optional[list] = None,
) -> IntegrateResult:
    """Refine a bracket for the integral of f over ``rect`` until its width
    is at most ``tol`` or the cell budget is exhausted.

    Exhausting the budget is not an error: the best bracket so far is
    returned with converged=False. ``bracket_log``, if given, receives the
    global bracket after the initial evaluation and after every round.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_cells < 1:
        raise ValueError("cell budget must be at least 1")

    if rect.volume == 0.0:
        bracket = Bracket(0.0, 0.0, cells=1, source="degenerate")
        return IntegrateResult(bracket, 0.0, True, 0)

    rigorous = bool(getattr(oracle, "rigorous", False))
    evaluate = _batch_evaluator(oracle, workers)

    los = np.array([rect.lower], dtype=float)
    his = np.array([rect.upper], dtype=float)
    enc_lo, enc_hi = evaluate(los, his)
    _require_finite(enc_lo, enc_hi)
    vols = np.prod(his - los, axis=1)

    lower = CompensatedSum()
    upper = CompensatedSum()
    lower.add(float(enc_lo[0] * vols[0]))
    upper.add(float(enc_hi[0] * vols[0]))
    if bracket_log is not None:
        bracket_log.append(
            Bracket(lower.value, upper.value, cells=1, source="adaptive")
        )

    refinements = 0
    converged = False
    while True:
        if upper.value - lower.value <= tol:
            converged = True
            break
        n_cells = los.shape[0]
        if n_cells >= max_cells:
            break

        scores = (enc_hi - enc_lo) * vols
        worst = scores.max()
        if worst <= 0.0:
            break  # every cell is exact; refinement cannot tighten the bracket
        selected = np.nonzero(scores >= _ROUND_FRACTION * worst)[0]

        room = max_cells - n_cells
        if selected.size > room:
            order = np.lexsort((selected, -scores[selected]))
            selected = np.sort(selected[order[:room]])

        axes = np.argmax(his[selected] - los[selected], axis=1)
        rows = np.arange(selected.size)
        a = los[selected, axes]
        b = his[selected, axes]
        mids = 0.5 * (a + b)
        splittable = (mids > a) & (mids < b)
        if not splittable.all():
            selected = selected[splittable]
            axes = axes[splittable]
            mids = mids[splittable]
            rows = np.arange(selected.size)
        if selected.size == 0:
            break  # nothing left to bisect; cannot tighten further

        # children interleaved per parent: low half at 2k, high half at 2k+1
        k = selected.size
        child_lo = np.empty((2 * k, los.shape[1]))
        child_hi = np.empty_like(child_lo)
        child_lo[0::2] = los[selected]
        child_hi[0::2] = his[selected]
        child_hi[0::2][rows, axes] = mids
        child_lo[1::2] = los[selected]
        child_lo[1::2][rows, axes] = mids
        child_hi[1::2] = his[selected]

        c_lo, c_hi = evaluate(child_lo, child_hi)
        _require_finite(c_lo, c_hi)
        if rigorous:
            parent_lo = np.repeat(enc_lo[selected], 2)
            parent_hi = np.repeat(enc_hi[selected], 2)
            tight_lo = np.maximum(c_lo, parent_lo)
            tight_hi = np.minimum(c_hi, parent_hi)
            consistent = tight_lo <= tight_hi
            c_lo = np.where(consistent, tight_lo, c_lo)
            c_hi = np.where(consistent, tight_hi, c_hi)

        child_vols = np.prod(child_hi - child_lo, axis=1)
        lower.add(float(np.sum(c_lo * child_vols) - np.sum(enc_lo[selected] * vols[selected])))
        upper.add(float(np.sum(c_hi * child_vols) - np.sum(enc_hi[selected] * vols[selected])))

        keep = np.ones(n_cells, dtype=bool)
        keep[selected] = False
        los = np.concatenate([los[keep], child_lo])
        his = np.concatenate([his[keep], child_hi])
        enc_lo = np.concatenate([enc_lo[keep], c_lo])
        enc_hi = np.concatenate([enc_hi[keep], c_hi])
        vols = np.concatenate([vols[keep], child_vols])
        refinements += k
        if bracket_log is not None:
            bracket_log.append(
                Bracket(lower.value, upper.value, cells=los.shape[0], source="adaptive")
            )

    bracket = Bracket(
        lower.value, upper.value, cells=los.shape[0], source="adaptive"
    )
    return IntegrateResult(bracket, bracket.midpoint, converged, refinements)


def integrate_with_support(
    oracle: BoundOracle,
    support: Rectangle,
    enclosing: Rectangle,
    tol: float,
    max_cells: int = DEFAULT_CELL_BUDGET,
    workers: int = 1,
) -> IntegrateResult:
    """Integrate a function vanishing outside ``support`` over any enclosing
    rectangle whose interior contains the support.

    The oracle must return (0, 0) on rectangles disjoint from the support
    (see bounds.SupportOracle); the result then agrees, within 2*tol, with
    the integral over any other valid enclosing rectangle.
    """
    if not support.strictly_inside(enclosing):
        raise ValueError("support must lie in the interior of the enclosing rectangle")
    result = adaptive_integrate(oracle, enclosing, tol, max_cells, workers)
    return replace(result, declared_support=support)
