"""Certified real comparisons via adaptive-precision interval arithmetic.

Every decision produced here is backed by disjoint interval enclosures: an
inequality is reported only once the enclosures of the two sides separate.
If the precision cap is reached first, PrecisionExhausted is raised; nothing
is ever decided by rounding luck.  Exact (rational) equality cases must be
handled by callers before asking for a strict decision, otherwise the
escalation loop cannot terminate.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Tuple

from mpmath import iv

from .errors import PrecisionExhausted

PREC_START = 64
PREC_CAP = 1 << 14


class workprec:
    """Temporarily set the interval working precision."""

    def __init__(self, prec: int):
        self.prec = prec
        self._saved = None

    def __enter__(self):
        self._saved = iv.prec
        iv.prec = self.prec
        return iv

    def __exit__(self, *exc):
        iv.prec = self._saved
        return False


def to_interval(x):
    """Enclose an int, float or Fraction in an interval at current precision."""
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    return iv.mpf(x)


def log2_interval(m):
    return iv.log(to_interval(m)) / iv.log(iv.mpf(2))


def ipow(base, expo):
    """base ** expo for intervals with base >= 0 (zero only with expo > 0)."""
    if base.a == 0 and base.b == 0:
        return iv.mpf(0)
    return base ** expo


def decide_le(lhs_fn: Callable[[], object], rhs_fn: Callable[[], object],
              start: int = PREC_START, cap: int = PREC_CAP) -> Tuple[bool, float]:
    """Certified decision of ``lhs < rhs`` vs ``lhs > rhs``.

    The callables are re-evaluated at each precision level and must build all
    interval quantities inside the call.  Returns ``(True, margin)`` when
    ``lhs < rhs`` is proven and ``(False, excess)`` when ``lhs > rhs`` is
    proven; both reported bounds are themselves certified lower bounds on the
    gap.  Exact ties must be peeled off by the caller first.
    """
    prec = start
    while True:
        with workprec(prec):
            a = lhs_fn()
            b = rhs_fn()
            if a.b < b.a:
                return True, float(b.a - a.b)
            if a.a > b.b:
                return False, float(a.a - b.b)
        if prec >= cap:
            raise PrecisionExhausted(
                "comparison undecided at %d bits" % cap)
        prec = min(prec * 2, cap)


def certified_sign(fn: Callable[[], object], start: int = PREC_START,
                   cap: int = PREC_CAP) -> int:
    """Sign of a provably nonzero quantity, by escalation."""
    prec = start
    while True:
        with workprec(prec):
            v = fn()
            if v.a > 0:
                return 1
            if v.b < 0:
                return -1
        if prec >= cap:
            raise PrecisionExhausted("sign undecided at %d bits" % cap)
        prec = min(prec * 2, cap)


def floor_power_log2(c: int, m: int, start: int = PREC_START,
                     cap: int = PREC_CAP) -> int:
    """Certified floor(c ** log2(m)) for integers c >= 2, m >= 2.

    The enclosure must exclude integers before the floor is trusted, so the
    true value must be irrational: callers handle the case where both c and
    m are powers of two (there the power is an exact integer).
    """
    if c < 2 or m < 2:
        raise ValueError("need c >= 2 and m >= 2")
    prec = start
    while True:
        with workprec(prec):
            e = iv.exp(iv.log(iv.mpf(c)) * iv.log(iv.mpf(m)) / iv.log(iv.mpf(2)))
            lo = int(e.a)
            hi = int(e.b)
            if lo == hi:
                return lo
        if prec >= cap:
            raise PrecisionExhausted(
                "floor(%d ** log2(%d)) undecided at %d bits" % (c, m, cap))
        prec = min(prec * 2, cap)
