"""Interval arithmetic with outward rounding slack.

Every primitive inflates its result by 4 ulps per side, so enclosures stay
valid under ordinary round-to-nearest arithmetic without directed rounding.
Monotone functions (exp, log, sqrt, odd powers) map endpoints; sin and cos
enumerate the multiples of pi/2 inside the argument; even powers go through
the absolute value.

Two parallel implementations are provided: scalar operations on `Interval`
(domain violations raise ExprDomainError) and vectorized operations on
numpy lo/hi arrays (domain violations mark the affected entries with +-inf,
which callers treat as an unbounded function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExprDomainError

_ULPS = 4.0
_HALF_PI = math.pi / 2.0


def _down(x: float) -> float:
    if not math.isfinite(x):
        return x
    return x - _ULPS * math.ulp(abs(x))


def _up(x: float) -> float:
    if not math.isfinite(x):
        return x
    return x + _ULPS * math.ulp(abs(x))


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; infinite endpoints signal unboundedness."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def from_value(x: float) -> Interval:
    return Interval(x, x)


def inflate(lo: float, hi: float) -> Interval:
    # NaN means the operands carried no information (e.g. inf * 0 after an
    # overflow); degrade to the everything interval so callers see an
    # unbounded enclosure instead of a crash.
    if math.isnan(lo) or math.isnan(hi):
        return Interval(-math.inf, math.inf)
    return Interval(_down(lo), _up(hi))


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------

def add(a: Interval, b: Interval) -> Interval:
    return inflate(a.lo + b.lo, a.hi + b.hi)


def sub(a: Interval, b: Interval) -> Interval:
    return inflate(a.lo - b.hi, a.hi - b.lo)


def neg(a: Interval) -> Interval:
    # Exact: negation introduces no rounding.
    return Interval(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    p = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    if any(math.isnan(v) for v in p):
        return Interval(-math.inf, math.inf)
    return inflate(min(p), max(p))


def reciprocal(b: Interval) -> Interval:
    if b.lo <= 0.0 <= b.hi:
        raise ExprDomainError("division by an interval containing zero", "/")
    return inflate(1.0 / b.hi, 1.0 / b.lo)


def div(a: Interval, b: Interval) -> Interval:
    return mul(a, reciprocal(b))


def absolute(a: Interval) -> Interval:
    if a.lo >= 0.0:
        return a
    if a.hi <= 0.0:
        return Interval(-a.hi, -a.lo)
    return Interval(0.0, max(-a.lo, a.hi))


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def exp_(a: Interval) -> Interval:
    return inflate(_safe_exp(a.lo), _safe_exp(a.hi))


def log_(a: Interval) -> Interval:
    if a.lo <= 0.0:
        raise ExprDomainError("log over an interval reaching non-positive values", "log")
    return inflate(math.log(a.lo), math.log(a.hi))


def sqrt_(a: Interval) -> Interval:
    if a.lo < 0.0:
        raise ExprDomainError("sqrt over an interval with negative values", "sqrt")
    return inflate(math.sqrt(a.lo), math.sqrt(a.hi))


def _trig_range(a: Interval, fn) -> Interval:
    if not a.is_finite() or a.hi - a.lo >= 2.0 * math.pi:
        return Interval(-1.0, 1.0)
    k0 = math.ceil(a.lo / _HALF_PI)
    k1 = math.floor(a.hi / _HALF_PI)
    candidates = [a.lo, a.hi] + [k * _HALF_PI for k in range(k0, k1 + 1)]
    vals = [fn(c) for c in candidates]
    out = inflate(min(vals), max(vals))
    return Interval(max(out.lo, -1.0), min(out.hi, 1.0))


def sin_(a: Interval) -> Interval:
    return _trig_range(a, math.sin)


def cos_(a: Interval) -> Interval:
    return _trig_range(a, math.cos)


def _safe_pow(x: float, y: float) -> float:
    try:
        return x ** y
    except OverflowError:
        return math.inf


def pow_int(a: Interval, n: int) -> Interval:
    if n == 0:
        return Interval(1.0, 1.0)
    if n < 0:
        return reciprocal(pow_int(a, -n))
    if n % 2 == 1:
        return inflate(_safe_pow(a.lo, n), _safe_pow(a.hi, n))
    mag = max(abs(a.lo), abs(a.hi))
    mig = 0.0 if a.lo <= 0.0 <= a.hi else min(abs(a.lo), abs(a.hi))
    out = inflate(_safe_pow(mig, n), _safe_pow(mag, n))
    return Interval(max(out.lo, 0.0), out.hi)


def pow_real(a: Interval, y: float) -> Interval:
    """x^y for non-integer y; requires a nonnegative base interval."""
    if a.lo < 0.0:
        raise ExprDomainError("fractional power of a negative base", "^")
    if y < 0.0:
        if a.lo <= 0.0:
            raise ExprDomainError("negative power of an interval reaching zero", "^")
        return inflate(_safe_pow(a.hi, y), _safe_pow(a.lo, y))
    return inflate(_safe_pow(a.lo, y), _safe_pow(a.hi, y))


def power(a: Interval, b: Interval) -> Interval:
    """General a^b via exp(b*log(a)); requires a strictly positive base."""
    if b.lo == b.hi:
        y = b.lo
        if float(y).is_integer():
            return pow_int(a, int(y))
        return pow_real(a, y)
    return exp_(mul(b, log_(a)))


# ---------------------------------------------------------------------------
# Vectorized operations over lo/hi arrays
# ---------------------------------------------------------------------------

_INF = np.inf


def _bdown(x: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = x - _ULPS * np.spacing(np.abs(x))
    return np.where(np.isfinite(x), out, x)


def _bup(x: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = x + _ULPS * np.spacing(np.abs(x))
    return np.where(np.isfinite(x), out, x)


def binflate(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    out_lo, out_hi = _bdown(lo), _bup(hi)
    bad = np.isnan(out_lo) | np.isnan(out_hi)
    if bad.any():
        out_lo = np.where(bad, -_INF, out_lo)
        out_hi = np.where(bad, _INF, out_hi)
    return out_lo, out_hi


def _bpoison(lo, hi, bad):
    """Mark entries flagged by ``bad`` as unbounded (+-inf)."""
    if not bad.any():
        return lo, hi
    lo = np.where(bad, -_INF, lo)
    hi = np.where(bad, _INF, hi)
    return lo, hi


def badd(alo, ahi, blo, bhi):
    return binflate(alo + blo, ahi + bhi)


def bsub(alo, ahi, blo, bhi):
    return binflate(alo - bhi, ahi - blo)


def bneg(alo, ahi):
    return -ahi, -alo


def bmul(alo, ahi, blo, bhi):
    with np.errstate(invalid="ignore"):
        p = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    bad = np.isnan(p).any(axis=0)
    lo = np.min(np.where(np.isnan(p), _INF, p), axis=0)
    hi = np.max(np.where(np.isnan(p), -_INF, p), axis=0)
    lo, hi = binflate(lo, hi)
    return _bpoison(lo, hi, bad)


def bdiv(alo, ahi, blo, bhi):
    bad = (blo <= 0.0) & (bhi >= 0.0)
    safe_blo = np.where(bad, 1.0, blo)
    safe_bhi = np.where(bad, 2.0, bhi)
    with np.errstate(divide="ignore"):
        rlo, rhi = binflate(1.0 / safe_bhi, 1.0 / safe_blo)
    lo, hi = bmul(alo, ahi, rlo, rhi)
    return _bpoison(lo, hi, bad)


def babs(alo, ahi):
    lo = np.where(alo >= 0.0, alo, np.where(ahi <= 0.0, -ahi, 0.0))
    hi = np.maximum(np.abs(alo), np.abs(ahi))
    return lo, hi


def bexp(alo, ahi):
    with np.errstate(over="ignore"):
        return binflate(np.exp(alo), np.exp(ahi))


def blog(alo, ahi):
    bad = alo <= 0.0
    safe_lo = np.where(bad, 1.0, alo)
    safe_hi = np.where(bad, 1.0, ahi)
    lo, hi = binflate(np.log(safe_lo), np.log(safe_hi))
    return _bpoison(lo, hi, bad)


def bsqrt(alo, ahi):
    bad = alo < 0.0
    safe_lo = np.where(bad, 0.0, alo)
    safe_hi = np.where(bad, 0.0, ahi)
    lo, hi = binflate(np.sqrt(safe_lo), np.sqrt(safe_hi))
    return _bpoison(lo, hi, bad)


def _btrig(alo, ahi, fn):
    # non-finite arguments fall back to the everything interval [-1, 1]
    full = ~(np.isfinite(alo) & np.isfinite(ahi)) | ((ahi - alo) >= 2.0 * math.pi)
    safe_lo = np.where(full, 0.0, alo)
    safe_hi = np.where(full, 0.0, ahi)
    k0 = np.ceil(safe_lo / _HALF_PI)
    k1 = np.floor(safe_hi / _HALF_PI)
    vals = [fn(safe_lo), fn(safe_hi)]
    base = vals[0]
    for j in range(4):
        k = k0 + j
        cand = fn(k * _HALF_PI)
        vals.append(np.where(k <= k1, cand, base))
    stack = np.stack(vals)
    lo, hi = binflate(stack.min(axis=0), stack.max(axis=0))
    lo = np.where(full, -1.0, np.maximum(lo, -1.0))
    hi = np.where(full, 1.0, np.minimum(hi, 1.0))
    return lo, hi


def bsin(alo, ahi):
    return _btrig(alo, ahi, np.sin)


def bcos(alo, ahi):
    return _btrig(alo, ahi, np.cos)


def bpow_int(alo, ahi, n: int):
    if n == 0:
        return np.ones_like(alo), np.ones_like(ahi)
    if n < 0:
        plo, phi = bpow_int(alo, ahi, -n)
        one = np.ones_like(alo)
        return bdiv(one, one, plo, phi)
    with np.errstate(over="ignore"):
        if n % 2 == 1:
            return binflate(alo ** n, ahi ** n)
        mag = np.maximum(np.abs(alo), np.abs(ahi))
        mig = np.where((alo <= 0.0) & (ahi >= 0.0), 0.0,
                       np.minimum(np.abs(alo), np.abs(ahi)))
        lo, hi = binflate(mig ** n, mag ** n)
    return np.maximum(lo, 0.0), hi


def bpow_real(alo, ahi, y: float):
    bad = alo < 0.0
    if y < 0.0:
        bad = bad | (alo <= 0.0)
        safe_lo = np.where(bad, 1.0, alo)
        safe_hi = np.where(bad, 1.0, ahi)
        with np.errstate(over="ignore", divide="ignore"):
            lo, hi = binflate(safe_hi ** y, safe_lo ** y)
    else:
        safe_lo = np.where(bad, 0.0, alo)
        safe_hi = np.where(bad, 0.0, ahi)
        with np.errstate(over="ignore"):
            lo, hi = binflate(safe_lo ** y, safe_hi ** y)
    return _bpoison(lo, hi, bad)


def bpow(alo, ahi, blo, bhi):
    degenerate = blo is bhi or (np.ndim(blo) == 0 and blo == bhi)
    if degenerate:
        y = float(blo)
        if y.is_integer():
            return bpow_int(alo, ahi, int(y))
        return bpow_real(alo, ahi, y)
    llo, lhi = blog(alo, ahi)
    mlo, mhi = bmul(blo, bhi, llo, lhi)
    return bexp(mlo, mhi)
