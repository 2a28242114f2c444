"""Adaptive-precision certified comparisons."""

import math
from fractions import Fraction

import pytest
from mpmath import iv

from cubenergy.errors import PrecisionExhausted
from cubenergy.intervals import (
    certified_sign,
    decide_le,
    floor_power_log2,
    ipow,
    log2_interval,
    to_interval,
    workprec,
)


def test_workprec_restores():
    before = iv.prec
    with workprec(777):
        assert iv.prec == 777
    assert iv.prec == before


def test_to_interval_encloses_fraction():
    x = to_interval(Fraction(1, 3))
    assert float(x.a) <= 1 / 3 <= float(x.b)
    assert float(x.b - x.a) < 1e-15


def test_log2_interval_contains_exact_value():
    x = log2_interval(8)
    assert float(x.a) <= 3.0 <= float(x.b)


def test_ipow_zero_base():
    z = ipow(iv.mpf(0), iv.mpf(2.5))
    assert float(z.a) == float(z.b) == 0.0


def test_ipow_contains_true_power():
    v = ipow(iv.mpf(2), iv.mpf(0.5))
    assert float(v.a) <= math.sqrt(2) <= float(v.b)


def test_decide_le_directions():
    less, margin = decide_le(lambda: iv.mpf(2), lambda: iv.mpf(3))
    assert less and margin == pytest.approx(1.0, abs=1e-12)
    more, excess = decide_le(lambda: iv.mpf(3), lambda: iv.mpf(2))
    assert not more and excess == pytest.approx(1.0, abs=1e-12)


def test_decide_le_escalates_through_tiny_gaps():
    # e vs a rational 1e-38 above it: undecidable at 64 bits, decidable later
    from mpmath import mp
    old = mp.dps
    try:
        mp.dps = 50
        close = Fraction(mp.nstr(mp.e, 45))
    finally:
        mp.dps = old
    target = close + Fraction(1, 10 ** 38)
    less, margin = decide_le(lambda: iv.exp(iv.mpf(1)),
                             lambda: to_interval(target))
    assert less
    assert 0 < margin < 1e-30


def test_decide_le_exact_tie_raises():
    with pytest.raises(PrecisionExhausted):
        decide_le(lambda: iv.log(iv.mpf(3)), lambda: iv.log(iv.mpf(3)),
                  start=64, cap=256)


def test_certified_sign():
    assert certified_sign(lambda: iv.mpf(2) - iv.mpf(1)) == 1
    assert certified_sign(lambda: iv.exp(iv.mpf(1)) - iv.mpf(3)) == -1
    with pytest.raises(PrecisionExhausted):
        certified_sign(lambda: iv.mpf(1) - iv.mpf(1), start=64, cap=128)


def test_floor_power_log2_frozen():
    assert floor_power_log2(3, 6) == 17
    assert floor_power_log2(5, 6) == 64
    assert floor_power_log2(3, 19) == 106


def test_floor_power_log2_validates():
    with pytest.raises(ValueError):
        floor_power_log2(1, 6)
    with pytest.raises(ValueError):
        floor_power_log2(6, 1)


def test_floor_power_log2_tracks_floats():
    for c in (3, 5, 6, 7, 9, 11):
        for m in (3, 5, 6, 10, 19):
            got = floor_power_log2(c, m)
            approx = c ** math.log2(m)
            assert abs(got - math.floor(approx)) <= 1
