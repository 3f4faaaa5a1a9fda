"""Shared expression corpus for randomized property tests.

Each entry carries the expression text, its dimension, a safe box on which
point and interval evaluation are defined everywhere, and (where known) a
Lipschitz constant valid on that box.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from darbox import Rectangle, parse
from darbox.expr import Expr


@dataclass(frozen=True)
class CorpusEntry:
    text: str
    dim: int
    box: Rectangle
    lipschitz: Optional[float] = None  # euclidean-norm constant on ``box``

    @property
    def expr(self) -> Expr:
        return parse(self.text, self.dim)


CORPUS = [
    CorpusEntry("x^2", 1, Rectangle((-2,), (2,)), lipschitz=4.0),
    CorpusEntry("3", 1, Rectangle((-5,), (5,)), lipschitz=0.0),
    CorpusEntry("sin(3*x)", 1, Rectangle((-2,), (2,)), lipschitz=3.0),
    CorpusEntry("cos(x)+x/2", 1, Rectangle((-3,), (3,)), lipschitz=1.5),
    CorpusEntry("exp(x/2)", 1, Rectangle((-1,), (1,)), lipschitz=0.9),
    CorpusEntry("log(x)", 1, Rectangle((0.5,), (4.0,)), lipschitz=2.0),
    CorpusEntry("sqrt(x)", 1, Rectangle((0.25,), (4.0,)), lipschitz=1.0),
    CorpusEntry("abs(x)-x^3/(x+3)", 1, Rectangle((-1,), (1,)), lipschitz=3.0),
    CorpusEntry("x*y", 2, Rectangle((0, 0), (1, 1)), lipschitz=1.5),
    CorpusEntry("x^2+y^2", 2, Rectangle((-1, -1), (1, 1)), lipschitz=3.0),
    CorpusEntry("abs(x*y)", 2, Rectangle((-1, -1), (1, 1)), lipschitz=1.5),
    CorpusEntry("sin(x)*cos(y)+x*y^2", 2, Rectangle((0, 0), (1, 1)), lipschitz=4.0),
    CorpusEntry("exp(-(x^2+y^2))", 2, Rectangle((-1, -1), (1, 1)), lipschitz=2.0),
    CorpusEntry("(x+y)/(3+x*y)", 2, Rectangle((0, 0), (1, 1)), lipschitz=1.0),
    CorpusEntry("x*y*z", 3, Rectangle((0, 0, 0), (1, 1, 1)), lipschitz=2.0),
    CorpusEntry("x1^2+x2^2+x3^2", 3, Rectangle((-1, -1, -1), (1, 1, 1)), lipschitz=4.0),
]

CONTINUOUS_2D = [e for e in CORPUS if e.dim == 2]
LIPSCHITZ_CORPUS = [e for e in CORPUS if e.lipschitz is not None]


def random_subbox(rng: random.Random, box: Rectangle, min_rel: float = 0.05) -> Rectangle:
    """A random non-degenerate sub-rectangle of ``box``."""
    lo = []
    hi = []
    for a, b in zip(box.lower, box.upper):
        w = b - a
        width = rng.uniform(min_rel * w, w)
        start = rng.uniform(a, b - width)
        lo.append(start)
        hi.append(start + width)
    return Rectangle(tuple(lo), tuple(hi))


def random_partition_axes(
    rng: random.Random, box: Rectangle, max_interior: int = 3
) -> tuple[tuple[float, ...], ...]:
    axes = []
    for a, b in zip(box.lower, box.upper):
        interior = sorted(rng.uniform(a + 1e-9, b - 1e-9) for _ in range(rng.randint(0, max_interior)))
        # drop near-duplicates to keep breakpoints strictly increasing
        pts = [a]
        for x in interior:
            if x - pts[-1] > 1e-9 * (b - a):
                pts.append(x)
        pts.append(b)
        axes.append(tuple(pts))
    return tuple(axes)


def random_point(rng: random.Random, box: Rectangle) -> tuple[float, ...]:
    return tuple(rng.uniform(a, b) for a, b in zip(box.lower, box.upper))
