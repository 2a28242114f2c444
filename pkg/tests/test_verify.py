"""Certified thresholds, cube sweeps, equality witnesses, witness search."""

import math
import random
from itertools import combinations

import pytest

from cubenergy.energy import EnergyKind, brute_force_energy, energy
from cubenergy.errors import BudgetExceeded
from cubenergy.lattice import PointSet
from cubenergy.verify import (
    ExponentTarget,
    energy_threshold,
    equality_witnesses,
    sweep_cube,
    witness_search_general_cube,
)


# ---------------------------------------------------------------------------
# exponent targets


def test_sharp_exponents():
    t = ExponentTarget.sharp(EnergyKind.ADDITIVE, 2)
    assert abs(t.exponent - math.log2(6)) < 1e-15
    t3 = ExponentTarget.sharp(EnergyKind.HIGHER, 3)
    assert abs(t3.exponent - math.log2(10)) < 1e-15
    c = ExponentTarget.custom(EnergyKind.ADDITIVE, 2, 1.5)
    assert c.exponent == 1.5


def test_sharp_rejects_bad_k():
    with pytest.raises(ValueError):
        ExponentTarget.sharp(EnergyKind.ADDITIVE, 1)


# ---------------------------------------------------------------------------
# certified floor of c^p


def test_energy_threshold_frozen_values():
    t = ExponentTarget.sharp(EnergyKind.ADDITIVE, 2)
    # powers of two resolve exactly; the rest need a certified floor
    assert energy_threshold(t, 0) == (0, False)
    assert energy_threshold(t, 1) == (1, True)
    assert energy_threshold(t, 2) == (6, True)
    assert energy_threshold(t, 3) == (17, False)
    assert energy_threshold(t, 5) == (64, False)
    assert energy_threshold(t, 8) == (216, True)
    assert energy_threshold(t, 16) == (1296, True)


def test_energy_threshold_custom_exponent():
    t = ExponentTarget.custom(EnergyKind.ADDITIVE, 2, 1.5)
    assert energy_threshold(t, 4) == (8, True)
    assert energy_threshold(t, 5) == (11, False)


def test_energy_threshold_tracks_float_power():
    t = ExponentTarget.sharp(EnergyKind.HIGHER, 3)
    for c in range(1, 40):
        bound, eq = energy_threshold(t, c)
        approx = c ** t.exponent
        assert bound <= approx + 1e-6
        assert bound >= approx - 1.0 - 1e-6
        if eq:
            # exact equality only happens on powers of two
            assert c & (c - 1) == 0


def test_energy_threshold_monotone():
    t = ExponentTarget.sharp(EnergyKind.ADDITIVE, 3)
    bounds = [energy_threshold(t, c)[0] for c in range(0, 30)]
    assert bounds == sorted(bounds)


# ---------------------------------------------------------------------------
# exhaustive sweeps


def _recount(n, d, target):
    """Independent recount of violations and equalities over all subsets."""
    pts = PointSet.cube(n, d).sorted_points()
    eq = 0
    viol = 0
    for size in range(1, len(pts) + 1):
        for combo in combinations(pts, size):
            a = PointSet.from_points(combo)
            e = brute_force_energy(a, target.k, target.kind).value
            bound, exact = energy_threshold(target, size)
            if e > bound:
                viol += 1
            elif exact and e == bound:
                eq += 1
    return viol, eq


@pytest.mark.parametrize("kind", list(EnergyKind))
@pytest.mark.parametrize("k", [2, 3])
def test_sweep_square_matches_recount(kind, k):
    target = ExponentTarget.sharp(kind, k)
    rep = sweep_cube(1, 2, target)
    viol, eq = _recount(1, 2, target)
    assert rep.subsets_checked == 15
    assert len(rep.violations) == viol == 0
    assert rep.equality_count == eq == 11


def test_sweep_cube_d3_frozen():
    rep = sweep_cube(1, 3, ExponentTarget.sharp(EnergyKind.ADDITIVE, 2))
    assert rep.subsets_checked == 255
    assert not rep.violations
    assert rep.equality_count == 49
    assert abs(rep.max_ratio - math.log2(6)) < 1e-12


def test_sweep_rows_and_mode():
    target = ExponentTarget.sharp(EnergyKind.ADDITIVE, 2)
    rep = sweep_cube(1, 2, target, collect_rows=True)
    assert rep.mode == "exhaustive"
    assert len(rep.rows) == rep.subsets_checked
    for mask, size, e, ratio in rep.rows:
        assert 1 <= mask < 16 and bin(mask).count("1") == size
        assert e <= energy_threshold(target, size)[0]
        if size >= 2:
            assert abs(ratio - math.log(e) / math.log(size)) < 1e-12
        else:
            assert ratio is None


def test_sweep_exhaustive_budget():
    with pytest.raises(BudgetExceeded):
        sweep_cube(2, 5, ExponentTarget.sharp(EnergyKind.ADDITIVE, 2))


def test_sweep_sampled_deterministic():
    t = ExponentTarget.sharp(EnergyKind.ADDITIVE, 2)
    a = sweep_cube(1, 4, t, sample=200, seed=5, collect_rows=True)
    b = sweep_cube(1, 4, t, sample=200, seed=5, collect_rows=True)
    assert a.rows == b.rows
    assert a.mode == "sample" and a.subsets_checked == 200
    assert not a.violations
    c = sweep_cube(1, 4, t, sample=200, seed=6, collect_rows=True)
    assert c.rows != a.rows


# ---------------------------------------------------------------------------
# equality witnesses


def test_equality_witnesses_segment():
    w = equality_witnesses(1, 2, EnergyKind.ADDITIVE)
    assert sorted(tuple(sorted(s)) for s in w) == \
        [((0,),), ((0,), (1,)), ((1,),)]


def test_equality_witnesses_square_frozen():
    w = equality_witnesses(2, 2, EnergyKind.ADDITIVE)
    got = sorted(tuple(sorted(s)) for s in w)
    assert len(got) == 11
    # all four singletons, all six pairs (both diagonals included), full square
    assert ((0, 0), (1, 1)) in got
    assert ((0, 1), (1, 0)) in got
    assert ((0, 0), (0, 1), (1, 0), (1, 1)) in got
    assert all(len(s) & (len(s) - 1) == 0 for s in got)


def test_equality_witnesses_wider_alphabet():
    w = equality_witnesses(1, 2, EnergyKind.ADDITIVE, n=2)
    got = sorted(tuple(sorted(s)) for s in w)
    # three singletons plus the three dilated pairs; the full set exceeds
    # its bound and is not an equality witness
    assert got == [((0,),), ((0,), (1,)), ((0,), (2,)),
                   ((1,),), ((1,), (2,)), ((2,),)]


def test_equality_witnesses_are_exact():
    for kind in EnergyKind:
        for w in equality_witnesses(2, 3, kind):
            target = ExponentTarget.sharp(kind, 3)
            bound, exact = energy_threshold(target, len(w))
            assert exact
            assert energy(w, 3, kind).value == bound


# ---------------------------------------------------------------------------
# witness search over tensor-power level sets


def test_witness_search_validates_n():
    with pytest.raises(ValueError):
        witness_search_general_cube(1, 3, 2.0)


def test_witness_search_single_axis():
    bar = math.log(19) / math.log(3)
    rep = witness_search_general_cube(2, 1, bar, threshold_log=(19, 3))
    assert [l.size for l in rep.levels] == [1, 3]
    assert rep.levels[1].energy == 19
    assert rep.best_ratio == pytest.approx(bar, abs=1e-15)
    # the full segment sits exactly on the bar, so nothing crosses
    assert not rep.crossed
    assert rep.undecided_levels == []


def test_witness_search_low_dimensions_do_not_cross():
    bar = math.log(19) / math.log(3)
    for d in (2, 3, 4):
        rep = witness_search_general_cube(2, d, bar, threshold_log=(19, 3))
        assert not rep.crossed, d
        assert rep.undecided_levels == []
        assert rep.best_ratio <= bar + 1e-12


def test_witness_search_level_records_are_exact():
    rep = witness_search_general_cube(2, 3, math.log(19) / math.log(3),
                                      threshold_log=(19, 3))
    for rec in rep.levels:
        assert rec.size >= 1 and rec.energy >= rec.size ** 2
        if rec.size >= 2:
            assert rec.ratio == pytest.approx(
                math.log(rec.energy) / math.log(rec.size), rel=1e-12)
