"""Error types shared across the package."""

from __future__ import annotations

from typing import Sequence


class UnboundedFunctionError(ArithmeticError):
    """The integrand is unbounded (or undefined) somewhere on the queried region."""


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class ExprDimensionError(ValueError):
    """A variable refers to an axis beyond the declared dimension."""

    def __init__(self, variable: str, dim: int, position: int):
        super().__init__(
            f"variable '{variable}' is out of range for dimension {dim} (offset {position})"
        )
        self.variable = variable
        self.position = position


class ExprDomainError(ArithmeticError):
    """Point or interval evaluation hit a domain violation (log, sqrt, /0, 0^neg)."""

    def __init__(self, message: str, node: str = ""):
        super().__init__(message if not node else f"{node}: {message}")
        self.node = node


class SectionFailureError(RuntimeError):
    """An inner iterated integral failed to converge at a specific outer point."""

    def __init__(self, outer_point: Sequence[float], detail: str = ""):
        pt = ", ".join(format(c, ".17g") for c in outer_point)
        msg = f"inner integral did not converge at outer point ({pt})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.outer_point = tuple(outer_point)
