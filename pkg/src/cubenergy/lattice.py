"""Exact lattice point sets and finitely supported integer maps on Z^d.

This is the arithmetic core: everything here is integer-exact.  Convolution
has two interchangeable backends, a sparse dict loop and a dense path that
packs the bounding box into one big integer per operand (carry-free mixed
radix slots) and performs a single exact multiply.  No floating point is
used anywhere in this module.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import DimensionMismatch, ParseError

Point = Tuple[int, ...]

# dense backend ceiling: number of cells in the result bounding box
DENSE_MAX_CELLS = 1 << 20


def _check_point(p, dim: int) -> Point:
    if not isinstance(p, tuple) or len(p) != dim:
        raise ValueError("expected coordinate tuple of length %d, got %r" % (dim, p))
    for c in p:
        if not isinstance(c, int) or isinstance(c, bool):
            raise ValueError("integer coordinates only, got %r" % (p,))
    return p


@dataclass(frozen=True)
class PointSet:
    """A finite subset of Z^d.  Iteration is in sorted order."""

    dim: int
    points: frozenset

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dim must be >= 0")
        if not isinstance(self.points, frozenset):
            object.__setattr__(self, "points", frozenset(self.points))
        for p in self.points:
            _check_point(p, self.dim)

    @classmethod
    def from_points(cls, pts: Iterable[Sequence[int]], dim: Optional[int] = None) -> "PointSet":
        rows = [tuple(p) for p in pts]
        if dim is None:
            if not rows:
                raise ValueError("cannot infer dimension of an empty set")
            dim = len(rows[0])
        return cls(dim, frozenset(rows))

    @classmethod
    def cube(cls, n: int, d: int) -> "PointSet":
        """The full grid {0, ..., n}^d."""
        if n < 0 or d < 0:
            raise ValueError("need n >= 0 and d >= 0")
        pts = [()]
        for _ in range(d):
            pts = [p + (c,) for p in pts for c in range(n + 1)]
        return cls(d, frozenset(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted(self.points))

    def __contains__(self, p) -> bool:
        return tuple(p) in self.points

    def sorted_points(self) -> List[Point]:
        return sorted(self.points)

    def translate(self, v: Sequence[int]) -> "PointSet":
        v = _check_point(tuple(v), self.dim)
        return PointSet(self.dim, frozenset(
            tuple(a + b for a, b in zip(p, v)) for p in self.points))

    def product(self, other: "PointSet") -> "PointSet":
        """Cartesian product with concatenated coordinates."""
        pts = frozenset(p + q for p in self.points for q in other.points)
        return PointSet(self.dim + other.dim, pts)


@dataclass(frozen=True)
class CountsMap:
    """Finitely supported map Z^d -> Z with zero values dropped."""

    dim: int
    entries: Dict[Point, int]

    def __post_init__(self):
        clean = {}
        for p, v in self.entries.items():
            _check_point(p, self.dim)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError("integer values only, got %r" % (v,))
            if v != 0:
                clean[p] = v
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, p) -> int:
        return self.entries.get(tuple(p), 0)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> List[Tuple[Point, int]]:
        return sorted(self.entries.items())

    def support(self) -> PointSet:
        return PointSet(self.dim, frozenset(self.entries))


def indicator(a: PointSet) -> CountsMap:
    return CountsMap(a.dim, {p: 1 for p in a.points})


def sum_values(f: CountsMap):
    return sum(f.entries.values())


def power_pointwise(f: CountsMap, k: int) -> CountsMap:
    if k < 1:
        raise ValueError("k must be >= 1")
    return CountsMap(f.dim, {p: v ** k for p, v in f.entries.items()})


def multiply_pointwise(f: CountsMap, g: CountsMap) -> CountsMap:
    if f.dim != g.dim:
        raise DimensionMismatch("dims %d and %d" % (f.dim, g.dim))
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    out = {}
    for p, v in small.entries.items():
        w = big.entries.get(p)
        if w is not None:
            out[p] = v * w
    return CountsMap(f.dim, out)


def reflect(f: CountsMap) -> CountsMap:
    return CountsMap(f.dim, {tuple(-c for c in p): v for p, v in f.entries.items()})


def _convolve_sparse(e1: dict, e2: dict) -> dict:
    out = {}
    for p, u in e1.items():
        for q, v in e2.items():
            s = tuple(a + b for a, b in zip(p, q))
            out[s] = out.get(s, 0) + u * v
    return out


def _box(entries: dict, dim: int):
    los = [min(p[i] for p in entries) for i in range(dim)]
    his = [max(p[i] for p in entries) for i in range(dim)]
    return los, his


def _dense_convolve(e1: dict, e2: dict, dim: int) -> dict:
    lo1, hi1 = _box(e1, dim)
    lo2, hi2 = _box(e2, dim)
    spans = [hi1[i] + hi2[i] - lo1[i] - lo2[i] + 1 for i in range(dim)]
    cells = 1
    for s in spans:
        cells *= s
    # row-major slot weights over the result box
    weights = [1] * dim
    for i in range(dim - 2, -1, -1):
        weights[i] = weights[i + 1] * spans[i + 1]

    bound = min(sum(e1.values()) * max(e2.values(), default=0),
                sum(e2.values()) * max(e1.values(), default=0))
    stride = (bound.bit_length() + 8) // 8

    def pack(entries, lo):
        buf = bytearray(cells * stride)
        for pt, val in entries.items():
            idx = 0
            for c, l, w in zip(pt, lo, weights):
                idx += (c - l) * w
            off = idx * stride
            buf[off:off + stride] = val.to_bytes(stride, "little")
        return int.from_bytes(buf, "little")

    product = pack(e1, lo1) * pack(e2, lo2)
    raw = product.to_bytes(cells * stride, "little")

    lo_res = [lo1[i] + lo2[i] for i in range(dim)]
    zero = bytes(stride)
    out = {}
    for idx in range(cells):
        off = idx * stride
        chunk = raw[off:off + stride]
        if chunk == zero:
            continue
        rem = idx
        coords = []
        for w in weights:
            c, rem = divmod(rem, w)
            coords.append(c)
        pt = tuple(c + l for c, l in zip(coords, lo_res))
        out[pt] = int.from_bytes(chunk, "little")
    return out


def _dense_cells(e1: dict, e2: dict, dim: int) -> int:
    lo1, hi1 = _box(e1, dim)
    lo2, hi2 = _box(e2, dim)
    cells = 1
    for i in range(dim):
        cells *= hi1[i] + hi2[i] - lo1[i] - lo2[i] + 1
    return cells


def convolve(f: CountsMap, g: CountsMap) -> CountsMap:
    """(f * g)(x) = sum_y f(y) g(x - y), exactly."""
    if f.dim != g.dim:
        raise DimensionMismatch("dims %d and %d" % (f.dim, g.dim))
    if not f.entries or not g.entries:
        return CountsMap(f.dim, {})
    nonneg = all(v >= 0 for v in f.entries.values()) and \
        all(v >= 0 for v in g.entries.values())
    if nonneg and f.dim > 0:
        cells = _dense_cells(f.entries, g.entries, f.dim)
        if cells <= DENSE_MAX_CELLS and len(f.entries) * len(g.entries) >= 4 * cells:
            return CountsMap(f.dim, _dense_convolve(f.entries, g.entries, f.dim))
    return CountsMap(f.dim, _convolve_sparse(f.entries, g.entries))


def correlate(f: CountsMap, g: CountsMap) -> CountsMap:
    """(f o g)(x) = sum_y f(y) g(x + y), via convolution with the reflection."""
    return convolve(reflect(f), g)


def iterate_convolve(f: CountsMap, k: int) -> CountsMap:
    """k-fold convolution power of f (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = f
    for _ in range(k - 1):
        out = convolve(out, f)
    return out


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightFn:
    """Finitely supported nonnegative weight on Z^d.

    exact=True keeps Fraction values, exact=False keeps floats.  Zeros are
    dropped so the stored support is exactly the positive support.
    """

    dim: int
    entries: dict
    exact: bool

    def __post_init__(self):
        clean = {}
        for p, v in self.entries.items():
            _check_point(p, self.dim)
            v = Fraction(v) if self.exact else float(v)
            if v < 0:
                raise ValueError("weights must be nonnegative, got %r" % (v,))
            if v != 0:
                clean[p] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_pairs(cls, pairs, dim: Optional[int] = None,
                   exact: Optional[bool] = None) -> "WeightFn":
        pairs = [(tuple(p), v) for p, v in pairs]
        if dim is None:
            if not pairs:
                raise ValueError("cannot infer dimension of an empty weight")
            dim = len(pairs[0][0])
        if exact is None:
            exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool)
                        for _, v in pairs)
        return cls(dim, dict(pairs), exact)

    def __getitem__(self, p):
        zero = Fraction(0) if self.exact else 0.0
        return self.entries.get(tuple(p), zero)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items())

    def support(self) -> PointSet:
        return PointSet(self.dim, frozenset(self.entries))

    def sup_norm(self):
        return max(self.entries.values()) if self.entries else (
            Fraction(0) if self.exact else 0.0)

    def scale(self, c) -> "WeightFn":
        c = Fraction(c) if self.exact else float(c)
        return WeightFn(self.dim, {p: v * c for p, v in self.entries.items()}, self.exact)

    def tensor(self, other: "WeightFn") -> "WeightFn":
        exact = self.exact and other.exact
        ent = {}
        for p, u in self.entries.items():
            for q, v in other.entries.items():
                w = u * v
                ent[p + q] = Fraction(w) if exact else float(w)
        return WeightFn(self.dim + other.dim, ent, exact)


def convolve_weights(f: WeightFn, g: WeightFn) -> WeightFn:
    if f.dim != g.dim:
        raise DimensionMismatch("dims %d and %d" % (f.dim, g.dim))
    return WeightFn(f.dim, _convolve_sparse(f.entries, g.entries),
                    f.exact and g.exact)


# ---------------------------------------------------------------------------
# serialization

def points_to_json(a: PointSet) -> str:
    return json.dumps([list(p) for p in a.sorted_points()], separators=(",", ":"))


def points_to_text(a: PointSet) -> str:
    return "\n".join(" ".join(str(c) for c in p) for p in a.sorted_points())


def _rows_to_set(rows: List[Point], dim: Optional[int]) -> PointSet:
    if rows:
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ParseError("ragged rows: %d vs %d coordinates" % (len(r), width))
        if dim is not None and dim != width:
            raise ParseError("expected dimension %d, rows have %d" % (dim, width))
        dim = width
    elif dim is None:
        dim = 0
    return PointSet(dim, frozenset(rows))


def parse_points_json(text: str, dim: Optional[int] = None) -> PointSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("invalid JSON: %s" % e) from None
    if not isinstance(data, list):
        raise ParseError("expected a JSON array of coordinate rows")
    rows = []
    for row in data:
        if not isinstance(row, list):
            raise ParseError("expected a coordinate row, got %r" % (row,))
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError("integer coordinates only, got %r" % (v,))
        rows.append(tuple(row))
    return _rows_to_set(rows, dim)


def parse_points_text(text: str, dim: Optional[int] = None) -> PointSet:
    """One point per line, whitespace-separated integers.  # starts a comment."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append(tuple(int(tok) for tok in line.split()))
        except ValueError:
            raise ParseError("line %d: integer coordinates only" % lineno) from None
    return _rows_to_set(rows, dim)


def parse_points_auto(text: str, dim: Optional[int] = None) -> PointSet:
    if text.lstrip().startswith("["):
        return parse_points_json(text, dim)
    return parse_points_text(text, dim)


# ---------------------------------------------------------------------------
# carry-free integer packing (shared by the enumeration backends)

def pack_points(pts: Sequence[Point], multiplier: int) -> List[int]:
    """Injectively pack points into integers so that coordinatewise sums of up
    to `multiplier` packed values (and pairwise differences) decode uniquely.
    """
    if not pts:
        return []
    dim = len(pts[0])
    if dim == 0:
        return [0] * len(pts)
    los = [min(p[i] for p in pts) for i in range(dim)]
    his = [max(p[i] for p in pts) for i in range(dim)]
    radix = 1
    weights = []
    for i in range(dim - 1, -1, -1):
        weights.append(radix)
        span = his[i] - los[i]
        radix *= max(multiplier, 2) * span + 1
    weights.reverse()
    out = []
    for p in pts:
        acc = 0
        for c, l, w in zip(p, los, weights):
            acc += (c - l) * w
        out.append(acc)
    return out
