"""Exact additive and higher energies of finite subsets of Z^d.

The additive energy of order k counts 2k-tuples (a_1..a_k, b_1..b_k) in A
with a_1+...+a_k = b_1+...+b_k.  The higher energy of order k counts
2k-tuples (a_1, b_1, ..., a_k, b_k) with a_1-b_1 = a_2-b_2 = ... = a_k-b_k.
Both are computed through the convolution engine; brute_force_energy is an
independent oracle that never touches that engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product as iter_product
from typing import Dict, List, Optional, Tuple

from .errors import BudgetExceeded
from .lattice import (CountsMap, PointSet, convolve, correlate, indicator,
                      iterate_convolve, multiply_pointwise, pack_points,
                      power_pointwise, sum_values)


class EnergyKind(str, Enum):
    ADDITIVE = "additive"
    HIGHER = "higher"


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 2:
        raise ValueError("energy order k must be an integer >= 2")


@dataclass(frozen=True)
class EnergyValue:
    """An exact energy together with the data identifying what it measures.

    Construction enforces the trivial bounds |A|^k <= E <= |A|^(2k-1) for a
    nonempty set (and E = 0 for the empty set), so an out-of-range value can
    never circulate.
    """

    kind: EnergyKind
    k: int
    set_size: int
    value: int

    def __post_init__(self):
        _check_k(self.k)
        m, k, v = self.set_size, self.k, self.value
        if m < 0:
            raise ValueError("set_size must be >= 0")
        lo = m ** k
        hi = m ** (2 * k - 1)
        if not lo <= v <= hi:
            raise ValueError(
                "energy %d outside trivial bounds [%d, %d] for |A|=%d, k=%d"
                % (v, lo, hi, m, k))

    def log_ratio(self) -> Optional[float]:
        """log E / log |A|, or None when |A| < 2."""
        if self.set_size < 2:
            return None
        return math.log(self.value) / math.log(self.set_size)

    def to_report(self, witness_path: Optional[str] = None) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "set_size": self.set_size,
            "energy": str(self.value),
            "log_ratio": self.log_ratio(),
            "witness_path": witness_path,
        }


def additive_energy(a: PointSet, k: int) -> EnergyValue:
    """E_k(A) = sum_x (k-fold convolution of the indicator)(x)^2."""
    _check_k(k)
    if len(a) == 0:
        return EnergyValue(EnergyKind.ADDITIVE, k, 0, 0)
    conv = iterate_convolve(indicator(a), k)
    return EnergyValue(EnergyKind.ADDITIVE, k, len(a),
                       sum_values(power_pointwise(conv, 2)))


def higher_energy(a: PointSet, k: int) -> EnergyValue:
    """E~_k(A) = sum_x (autocorrelation of the indicator)(x)^k."""
    _check_k(k)
    if len(a) == 0:
        return EnergyValue(EnergyKind.HIGHER, k, 0, 0)
    ind = indicator(a)
    auto = correlate(ind, ind)
    return EnergyValue(EnergyKind.HIGHER, k, len(a),
                       sum_values(power_pointwise(auto, k)))


def energy(a: PointSet, k: int, kind: EnergyKind) -> EnergyValue:
    if kind is EnergyKind.ADDITIVE:
        return additive_energy(a, k)
    if kind is EnergyKind.HIGHER:
        return higher_energy(a, k)
    raise ValueError("unknown energy kind %r" % (kind,))


def brute_force_energy(a: PointSet, k: int, kind: EnergyKind,
                       budget: int = 10 ** 9) -> EnergyValue:
    """Independent oracle: count the defining 2k-tuples directly.

    Points are packed into carry-free integers so tuple comparisons are exact
    single int comparisons; the count itself is a literal enumeration over
    k-tuples (additive) or difference pairs (higher), |A|^(2k) comparisons in
    the worst case.  Raises BudgetExceeded when |A|^(2k) > budget.
    """
    _check_k(k)
    m = len(a)
    if m == 0:
        return EnergyValue(kind, k, 0, 0)
    if m ** (2 * k) > budget:
        raise BudgetExceeded("|A|^(2k) = %d exceeds budget %d" % (m ** (2 * k), budget))
    packed = pack_points(a.sorted_points(), k)
    if kind is EnergyKind.ADDITIVE:
        sums = [sum(t) for t in iter_product(packed, repeat=k)]
        value = sum(sums.count(s) for s in sums)
    else:
        diffs = [x - y for x in packed for y in packed]
        value = sum(diffs.count(d) ** (k - 1) for d in diffs)
    return EnergyValue(kind, k, m, value)


def packed_subset_energy(sel: List[int], k: int, kind: EnergyKind) -> int:
    """Energy of a set given as carry-free packed integers (fast inner loop
    for sweeps; pack with pack_points(..., max(k, 2)))."""
    if not sel:
        return 0
    if kind is EnergyKind.HIGHER:
        counts: Dict[int, int] = {}
        get = counts.get
        for x in sel:
            for y in sel:
                d = x - y
                counts[d] = get(d, 0) + 1
        return sum(v ** k for v in counts.values())
    cur: Dict[int, int] = {x: 1 for x in sel}
    for _ in range(k - 1):
        nxt: Dict[int, int] = {}
        get = nxt.get
        for s, c in cur.items():
            for x in sel:
                t = s + x
                nxt[t] = get(t, 0) + c
        cur = nxt
    return sum(c * c for c in cur.values())


def interval_energy_closed_form(n: int) -> int:
    """E_2({0,...,n}) in closed form, split by parity of n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n % 2:
        m = (n + 1) // 2
        num = 16 * m ** 3 + 2 * m
    else:
        m = n // 2
        num = 16 * m ** 3 + 24 * m ** 2 + 14 * m + 3
    if num % 3:
        raise ArithmeticError("closed form must be divisible by 3")
    return num // 3


def full_cube_energy(n: int, d: int, k: int, kind: EnergyKind) -> EnergyValue:
    """Energy of {0..n}^d computed as the d-th power of the 1-d value."""
    _check_k(k)
    if n < 0 or d < 0:
        raise ValueError("need n >= 0 and d >= 0")
    base = energy(PointSet.cube(n, 1), k, kind)
    return EnergyValue(kind, k, (n + 1) ** d, base.value ** d)


# ---------------------------------------------------------------------------
# last-coordinate decomposition


@dataclass(frozen=True)
class SplitDecomposition:
    """Slices of A by its last coordinate, projected one dimension down.

    a0 = {x : (x, 0) in A}, a1 = {x : (x, 1) in A}.  cross_terms / c1 / c2
    are filled by decomposition_identity_check.
    """

    a0: PointSet
    a1: PointSet
    cross_terms: Tuple[int, ...] = ()
    c1: Optional[int] = None
    c2: Optional[int] = None

    def reconstruct(self) -> PointSet:
        pts = {p + (0,) for p in self.a0.points} | \
              {p + (1,) for p in self.a1.points}
        return PointSet(self.a0.dim + 1, frozenset(pts))


def split_last_coordinate(a: PointSet) -> SplitDecomposition:
    """Split A by a binary last coordinate.  Requires dim >= 1 and last
    coordinates contained in {0, 1}."""
    if a.dim < 1:
        raise ValueError("need dim >= 1 to split")
    p0, p1 = set(), set()
    for p in a.points:
        if p[-1] == 0:
            p0.add(p[:-1])
        elif p[-1] == 1:
            p1.add(p[:-1])
        else:
            raise ValueError("last coordinate must be 0 or 1, got %d" % p[-1])
    d = a.dim - 1
    return SplitDecomposition(PointSet(d, frozenset(p0)), PointSet(d, frozenset(p1)))


def bullet_product(f: CountsMap, g: CountsMap, k: int) -> int:
    """sum_c (g correlated with f)(c)^k, i.e. the k-th moment of the joint
    difference counts; for f = g = indicator(A) this equals the higher energy."""
    _check_k(k)
    return sum_values(power_pointwise(correlate(g, f), k))


@dataclass(frozen=True)
class DecompositionReport:
    kind: EnergyKind
    k: int
    set_size: int
    lhs: int
    e0: int
    e1: int
    split: SplitDecomposition
    rhs: int
    holds: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "set_size": self.set_size,
            "lhs": str(self.lhs),
            "e0": str(self.e0),
            "e1": str(self.e1),
            "cross_terms": [str(c) for c in self.split.cross_terms],
            "c1": None if self.split.c1 is None else str(self.split.c1),
            "c2": None if self.split.c2 is None else str(self.split.c2),
            "rhs": str(self.rhs),
            "holds": self.holds,
        }


def decomposition_identity_check(a: PointSet, k: int, kind: EnergyKind) -> DecompositionReport:
    """Verify the exact split identity for a set with binary last coordinate.

    additive:  E_k(A) = E_k(A0) + E_k(A1)
                        + sum_{i=1}^{k-1} binom(k,i)^2 * S_i,
               S_i = sum_x (chi0^{*i} * chi1^{*(k-i)})(x)^2.
    higher:    E~_k(A) = C1 + C2 + E~_k(A0) + E~_k(A1)
                        + sum_{i=1}^{k-1} binom(k,i) * T_i,
               T_i = sum_x (chi0 o chi0)^i (chi1 o chi1)^{k-i} (x),
               C1/C2 the two mixed bullet products.
    """
    _check_k(k)
    split = split_last_coordinate(a)
    a0, a1 = split.a0, split.a1
    lhs = energy(a, k, kind).value
    e0 = energy(a0, k, kind).value if len(a0) else 0
    e1 = energy(a1, k, kind).value if len(a1) else 0
    ind0, ind1 = indicator(a0), indicator(a1)

    cross: List[int] = []
    if kind is EnergyKind.ADDITIVE:
        rhs = e0 + e1
        for i in range(1, k):
            if len(a0) == 0 or len(a1) == 0:
                cross.append(0)
                continue
            conv = iterate_convolve(ind0, i)
            conv = convolve(conv, iterate_convolve(ind1, k - i))
            s_i = sum_values(power_pointwise(conv, 2))
            cross.append(s_i)
            rhs += math.comb(k, i) ** 2 * s_i
        split = SplitDecomposition(a0, a1, tuple(cross))
    else:
        c1 = bullet_product(ind0, ind1, k) if len(a0) and len(a1) else 0
        c2 = bullet_product(ind1, ind0, k) if len(a0) and len(a1) else 0
        rhs = c1 + c2 + e0 + e1
        auto0 = correlate(ind0, ind0)
        auto1 = correlate(ind1, ind1)
        for i in range(1, k):
            if len(a0) == 0 or len(a1) == 0:
                cross.append(0)
                continue
            t_i = sum_values(multiply_pointwise(power_pointwise(auto0, i),
                                                power_pointwise(auto1, k - i)))
            cross.append(t_i)
            rhs += math.comb(k, i) * t_i
        split = SplitDecomposition(a0, a1, tuple(cross), c1, c2)

    return DecompositionReport(kind, k, len(a), lhs, e0, e1, split, rhs, lhs == rhs)
