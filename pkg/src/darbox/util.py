"""Compensated accumulation and order-preserving parallel evaluation.

Every reduction in the package runs in a fixed order so that results are
bit-identical regardless of how many workers evaluated the inputs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")


class CompensatedSum:
    """Neumaier running sum; deterministic for a fixed sequence of add() calls."""

    __slots__ = ("_sum", "_comp")

    def __init__(self, start: float = 0.0):
        self._sum = float(start)
        self._comp = 0.0

    def add(self, value: float) -> None:
        t = self._sum + value
        if abs(self._sum) >= abs(value):
            self._comp += (self._sum - t) + value
        else:
            self._comp += (value - t) + self._sum
        self._sum = t

    @property
    def value(self) -> float:
        return self._sum + self._comp


def compensated_total(values: Iterable[float]) -> float:
    acc = CompensatedSum()
    for v in values:
        acc.add(v)
    return acc.value


def ordered_map(fn: Callable[[T], U], items: Sequence[T], workers: int = 1) -> list[U]:
    """Map ``fn`` over ``items`` preserving input order.

    With ``workers > 1`` evaluations run on a thread pool; because results are
    collected in input order, the output is identical for any worker count.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
