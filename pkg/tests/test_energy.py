"""Exact energy computation, closed forms, and decomposition identities."""

import math
import random
from itertools import product

import pytest

from cubenergy.energy import (
    EnergyKind,
    EnergyValue,
    additive_energy,
    brute_force_energy,
    bullet_product,
    decomposition_identity_check,
    energy,
    full_cube_energy,
    higher_energy,
    interval_energy_closed_form,
    packed_subset_energy,
    split_last_coordinate,
)
from cubenergy.errors import BudgetExceeded
from cubenergy.lattice import CountsMap, PointSet, indicator, pack_points


def _random_set(rng, dim, lo=0, hi=3, max_size=8):
    pts = {tuple(rng.randint(lo, hi) for _ in range(dim))
           for _ in range(rng.randint(1, max_size))}
    return PointSet.from_points(pts)


def _tuple_brute_additive(a, k):
    pts = a.sorted_points()
    sums = {}
    for combo in product(pts, repeat=k):
        s = tuple(map(sum, zip(*combo)))
        sums[s] = sums.get(s, 0) + 1
    return sum(v * v for v in sums.values())


def _tuple_brute_higher(a, k):
    pts = a.sorted_points()
    diffs = {}
    for p in pts:
        for q in pts:
            d = tuple(x - y for x, y in zip(p, q))
            diffs[d] = diffs.get(d, 0) + 1
    return sum(v ** k for v in diffs.values())


# ---------------------------------------------------------------------------
# closed forms on full cubes


def test_full_cube_additive_closed_form():
    for d in (1, 2, 3):
        for k in (2, 3, 4):
            want = math.comb(2 * k, k) ** d
            assert full_cube_energy(1, d, k, EnergyKind.ADDITIVE).value == want


def test_full_cube_higher_closed_form():
    for d in (1, 2, 3):
        for k in (2, 3, 4):
            want = (2 ** k + 2) ** d
            assert full_cube_energy(1, d, k, EnergyKind.HIGHER).value == want


def test_full_cube_against_brute_force_small():
    for n, d, k, kind in [(1, 2, 2, EnergyKind.ADDITIVE),
                          (2, 1, 3, EnergyKind.HIGHER),
                          (2, 2, 2, EnergyKind.ADDITIVE),
                          (1, 3, 2, EnergyKind.HIGHER)]:
        cube = PointSet.cube(n, d)
        assert full_cube_energy(n, d, k, kind).value == \
            brute_force_energy(cube, k, kind).value


def test_interval_closed_form_values():
    assert [interval_energy_closed_form(n) for n in (1, 2, 3, 4)] == [6, 19, 44, 85]


def test_interval_closed_form_matches_brute_force():
    for n in range(1, 12):
        seg = PointSet.cube(n, 1)
        assert interval_energy_closed_form(n) == \
            brute_force_energy(seg, 2, EnergyKind.ADDITIVE).value


# ---------------------------------------------------------------------------
# convolution backend vs tuple-level oracle


def test_energy_matches_tuple_oracle():
    rng = random.Random(23)
    for _ in range(15):
        dim = rng.randint(1, 3)
        a = _random_set(rng, dim)
        for k in (2, 3):
            assert additive_energy(a, k).value == _tuple_brute_additive(a, k)
            assert higher_energy(a, k).value == _tuple_brute_higher(a, k)


def test_second_energies_coincide():
    # the k = 2 additive energy and the k = 2 correlation energy count the
    # same additive quadruples
    rng = random.Random(29)
    for _ in range(20):
        a = _random_set(rng, rng.randint(1, 3))
        assert additive_energy(a, 2).value == higher_energy(a, 2).value


def test_energy_dispatch_and_k_validation():
    a = PointSet.cube(1, 1)
    assert energy(a, 2, EnergyKind.ADDITIVE).value == 6
    assert energy(a, 3, EnergyKind.HIGHER).value == 10
    with pytest.raises(ValueError):
        additive_energy(a, 1)
    with pytest.raises(ValueError):
        higher_energy(a, 0)


# ---------------------------------------------------------------------------
# invariance properties


def test_translation_invariance():
    rng = random.Random(31)
    for _ in range(10):
        dim = rng.randint(1, 3)
        a = _random_set(rng, dim)
        v = [rng.randint(-10, 10) for _ in range(dim)]
        b = a.translate(v)
        for k in (2, 3):
            assert additive_energy(a, k).value == additive_energy(b, k).value
            assert higher_energy(a, k).value == higher_energy(b, k).value


def test_reflection_and_permutation_invariance():
    rng = random.Random(37)
    for _ in range(10):
        a = _random_set(rng, 2)
        flipped = PointSet.from_points([(-x, y) for x, y in a])
        swapped = PointSet.from_points([(y, x) for x, y in a])
        for k in (2, 3):
            for kind in EnergyKind:
                e = energy(a, k, kind).value
                assert energy(flipped, k, kind).value == e
                assert energy(swapped, k, kind).value == e


def test_trivial_bounds_enforced():
    rng = random.Random(41)
    for _ in range(10):
        a = _random_set(rng, 2)
        m = len(a)
        for k in (2, 3):
            e = additive_energy(a, k)
            assert m ** k <= e.value <= m ** (2 * k - 1)
            h = higher_energy(a, k)
            assert m ** 2 <= h.value


def test_energy_value_validates_range():
    with pytest.raises(ValueError):
        EnergyValue(kind=EnergyKind.ADDITIVE, k=2, set_size=3, value=2)


def test_to_report_round_numbers():
    v = additive_energy(PointSet.cube(1, 1), 2)
    rep = v.to_report()
    assert rep["energy"] == "6"
    assert rep["set_size"] == 2
    assert abs(rep["log_ratio"] - math.log2(6)) < 1e-12
    assert additive_energy(PointSet.from_points([(7,)]), 2).log_ratio() is None


# ---------------------------------------------------------------------------
# budget and packed enumeration


def test_brute_force_budget():
    a = PointSet.cube(1, 4)
    with pytest.raises(BudgetExceeded):
        brute_force_energy(a, 3, EnergyKind.ADDITIVE, budget=10 ** 3)


def test_packed_subset_energy_agrees():
    rng = random.Random(43)
    for _ in range(10):
        a = _random_set(rng, 2)
        k = rng.choice([2, 3])
        packed = pack_points(a.sorted_points(), 2 * k * 3 + 1)
        for kind in EnergyKind:
            assert packed_subset_energy(packed, k, kind) == energy(a, k, kind).value


# ---------------------------------------------------------------------------
# slicing and the bullet product


def test_split_last_coordinate_partitions():
    a = PointSet.from_points([(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)])
    dec = split_last_coordinate(a)
    assert dec.a0.sorted_points() == [(0,), (1,)]
    assert dec.a1.sorted_points() == [(0,), (1,), (2,)]
    assert dec.reconstruct().sorted_points() == a.sorted_points()
    with pytest.raises(ValueError):
        split_last_coordinate(PointSet.from_points([(0, 2)]))


def test_bullet_product_is_higher_energy_on_diagonal():
    rng = random.Random(47)
    for _ in range(10):
        a = _random_set(rng, 2)
        f = indicator(a)
        for k in (2, 3):
            assert bullet_product(f, f, k) == higher_energy(a, k).value


def test_bullet_product_symmetry():
    # correlate(g, f) and correlate(f, g) are reflections of each other, so
    # the k-th moments agree
    rng = random.Random(53)
    f = CountsMap(1, {(rng.randint(0, 5),): rng.randint(1, 3) for _ in range(4)})
    g = CountsMap(1, {(rng.randint(0, 5),): rng.randint(1, 3) for _ in range(4)})
    for k in (2, 3):
        assert bullet_product(f, g, k) == bullet_product(g, f, k)


# ---------------------------------------------------------------------------
# decomposition identities


def test_decomposition_identity_random_subsets():
    rng = random.Random(59)
    cube_pts = PointSet.cube(1, 3).sorted_points()
    for _ in range(20):
        size = rng.randint(1, len(cube_pts))
        a = PointSet.from_points(rng.sample(cube_pts, size))
        for k in (2, 3):
            for kind in EnergyKind:
                rep = decomposition_identity_check(a, k, kind)
                assert rep.holds, (a.sorted_points(), k, kind)
                assert rep.lhs == rep.rhs == energy(a, k, kind).value


def test_decomposition_identity_degenerate_slice():
    # every point in one hyperplane: one side of the split is empty
    a = PointSet.from_points([(0, 0), (1, 0), (3, 0)])
    for kind in EnergyKind:
        rep = decomposition_identity_check(a, 2, kind)
        assert rep.holds
