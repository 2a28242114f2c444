"""Exact sign certification for the sharp-exponent coefficient polynomial and
certified grid checks for every scalar inequality the energy bounds rest on.

The central objects are the coefficients C_i = aCoeff*alpha + bConst with
alpha = k/log2 C(2k,k): integer linear forms in one fixed irrational.  Signs
are decided exactly, either by the integer comparison 2^(k*q) vs M^p or by
adaptive-precision intervals; floating point never decides a sign.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

from mpmath import iv

from .errors import PrecisionExhausted
from .intervals import decide_le, ipow, log2_interval, to_interval, workprec

# exact-power comparison budget for compare_alpha, in bits
EXACT_BITS_CAP = 1 << 21


def _is_power_of_two(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class ExactAlpha:
    """alpha = k / log2(M) with M = C(2k,k), kept symbolically."""

    k: int
    central: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.central != math.comb(2 * self.k, self.k):
            raise ValueError("central must equal C(2k,k)")
        if _is_power_of_two(self.central):
            raise AssertionError("C(2k,k) is never a power of two for k >= 2")
        # alpha in (1/2, 1) <=> 2^k < M < 4^k
        if not 2 ** self.k < self.central < 4 ** self.k:
            raise AssertionError("alpha must lie in (1/2, 1)")

    @classmethod
    def for_k(cls, k: int) -> "ExactAlpha":
        return cls(k, math.comb(2 * k, k))

    def interval(self):
        """Enclosure at the current interval precision."""
        return iv.mpf(self.k) / log2_interval(self.central)

    def float_value(self) -> float:
        return self.k / math.log2(self.central)


def compare_alpha(alpha: ExactAlpha, num: int, den: int) -> str:
    """Certified order of alpha vs num/den: returns '<' or '>'.

    alpha > num/den  <=>  2^(k*den) > M^num for positive num/den, decided by
    exact integer powers when they fit the bit budget, else by interval
    escalation.  Equality is impossible (alpha is irrational), so the answer
    is always one of the two strict orders.
    """
    if den == 0:
        raise ZeroDivisionError("den must be nonzero")
    if den < 0:
        num, den = -num, -den
    if num <= 0:
        return ">"
    g = math.gcd(num, den)
    num //= g
    den //= g
    k, m = alpha.k, alpha.central
    lhs_bits = k * den
    rhs_bits = num * m.bit_length()
    if max(lhs_bits, rhs_bits) <= EXACT_BITS_CAP:
        lhs = 1 << (k * den)
        rhs = m ** num
        if lhs == rhs:
            raise AssertionError("alpha compared equal to a rational")
        return ">" if lhs > rhs else "<"
    less, _ = decide_le(lambda: alpha.interval(),
                        lambda: iv.mpf(num) / iv.mpf(den))
    return "<" if less else ">"


@dataclass(frozen=True)
class CoeffLinearForm:
    """C_i = alpha_coeff * alpha + const_coeff, both integers."""

    k: int
    i: int
    alpha_coeff: int
    const_coeff: int

    def evaluate(self, alpha_value: float) -> float:
        return self.alpha_coeff * alpha_value + self.const_coeff


@lru_cache(maxsize=None)
def coefficient_forms(k: int) -> Tuple[CoeffLinearForm, ...]:
    """All forms C_0..C_2k for one k (cached; the table is reused heavily)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    w = [math.comb(k, j) ** 2 for j in range(k + 1)]
    forms = []
    for i in range(2 * k + 1):
        a = 0
        b = 0
        for j in range(max(0, i - k), min(k, i) + 1):
            l = i - j
            t = w[j] * w[l] * j * (k - l)
            a += t
            b += t * (l - j)
        forms.append(CoeffLinearForm(k, i, a, b))
    return tuple(forms)


def coefficient_form(k: int, i: int) -> CoeffLinearForm:
    if not 0 <= i <= 2 * k:
        raise IndexError("i must lie in [0, 2k]")
    return coefficient_forms(k)[i]


def sign_of_coefficient(k: int, i: int) -> int:
    """Exact sign of C_i; 0 iff both integer coefficients vanish."""
    form = coefficient_form(k, i)
    a, b = form.alpha_coeff, form.const_coeff
    if a < 0:
        raise AssertionError("alpha coefficient must be nonnegative")
    if a == 0:
        return 0 if b == 0 else (1 if b > 0 else -1)
    if b >= 0:
        return 1
    # C_i > 0 <=> alpha > -b/a
    return 1 if compare_alpha(ExactAlpha.for_k(k), -b, a) == ">" else -1


@dataclass(frozen=True)
class SignCertificate:
    """Signs of C_1..C_k plus the structural facts the Descartes argument
    needs: palindromicity (checked on the exact integer forms over the full
    index range) and the sign-change count over nonzero entries."""

    k: int
    signs: Tuple[int, ...]
    sign_changes: int
    at_most_one_change: bool
    palindromic: bool
    endpoints_vanish: bool
    balance_identity: bool
    value_at_one_positive: bool

    @property
    def certified(self) -> bool:
        return (self.at_most_one_change and self.palindromic
                and self.endpoints_vanish and self.balance_identity
                and self.value_at_one_positive)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "signs": list(self.signs),
            "sign_changes": self.sign_changes,
            "at_most_one_change": self.at_most_one_change,
            "palindromic": self.palindromic,
            "endpoints_vanish": self.endpoints_vanish,
            "balance_identity": self.balance_identity,
            "value_at_one_positive": self.value_at_one_positive,
            "certified": self.certified,
        }


def weight_balance_identity(k: int) -> bool:
    """Exact identity sum_i C(k,i)^2 (k-i) = sum_i C(k,i)^2 i: the two log
    arguments in the derivative split agree at y = 1."""
    w = [math.comb(k, i) ** 2 for i in range(k + 1)]
    return sum(v * (k - i) for i, v in enumerate(w)) == \
        sum(v * i for i, v in enumerate(w))


def numerator_positive_at_one(k: int) -> bool:
    """Certified sign of P(1) = sum_i C_i(alpha): positive exactly when
    alpha > k/(2k-1), i.e. the sharp exponent sits below 2k-1."""
    forms = coefficient_forms(k)
    a_sum = sum(f.alpha_coeff for f in forms)
    b_sum = sum(f.const_coeff for f in forms)
    if a_sum <= 0:
        raise AssertionError("total alpha coefficient must be positive")
    if b_sum >= 0:
        return True
    return compare_alpha(ExactAlpha.for_k(k), -b_sum, a_sum) == ">"


def certify_sign_pattern(k: int) -> SignCertificate:
    forms = coefficient_forms(k)
    palindromic = all(
        forms[i].alpha_coeff == forms[2 * k - i].alpha_coeff
        and forms[i].const_coeff == forms[2 * k - i].const_coeff
        for i in range(k + 1))
    endpoints = (forms[0].alpha_coeff == forms[0].const_coeff == 0
                 and forms[2 * k].alpha_coeff == forms[2 * k].const_coeff == 0)
    signs = tuple(sign_of_coefficient(k, i) for i in range(1, k + 1))
    nonzero = [s for s in signs if s != 0]
    changes = sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)
    return SignCertificate(
        k, signs, changes, changes <= 1, palindromic, endpoints,
        weight_balance_identity(k), numerator_positive_at_one(k))


def sign_table(k_lo: int, k_hi: int) -> List[SignCertificate]:
    return [certify_sign_pattern(k) for k in range(k_lo, k_hi + 1)]


# ---------------------------------------------------------------------------
# scalar inequalities


def legendre_q(k: int, t):
    """Q_k(t) = 2^-k sum_j C(k,j)^2 (t-1)^(k-j) (t+1)^j.

    Exact Fraction for int/Fraction input, float otherwise.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    exact = isinstance(t, (int, Fraction)) and not isinstance(t, bool)
    tv = Fraction(t) if exact else float(t)
    total = 0
    for j in range(k + 1):
        total += math.comb(k, j) ** 2 * (tv - 1) ** (k - j) * (tv + 1) ** j
    if exact:
        return Fraction(total, 2 ** k)
    return total / 2.0 ** k


def _legendre_q_iv(k: int, tiv):
    total = iv.mpf(0)
    for j in range(k + 1):
        total += math.comb(k, j) ** 2 * (tiv - 1) ** (k - j) * (tiv + 1) ** j
    return total / 2 ** k


def _pk_iv(k: int):
    return log2_interval(math.comb(2 * k, k))


def _qk_iv(k: int):
    return log2_interval(2 ** k + 2)


@dataclass
class GridCheckReport:
    name: str
    k: int
    points: int
    equalities: List[float] = field(default_factory=list)
    failures: List[dict] = field(default_factory=list)
    undecided: List[float] = field(default_factory=list)
    min_margin: Optional[float] = None
    shape_flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.undecided

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "k": self.k,
            "points": self.points,
            "equalities": self.equalities,
            "failures": self.failures,
            "undecided": self.undecided,
            "min_margin": self.min_margin,
            "shape_flags": self.shape_flags,
            "ok": self.ok,
        }


def _grid_decide(report: GridCheckReport, x: float,
                 lhs_fn: Callable[[], object], rhs_fn: Callable[[], object]):
    try:
        holds, margin = decide_le(lhs_fn, rhs_fn)
    except PrecisionExhausted:
        report.undecided.append(x)
        return
    if holds:
        if report.min_margin is None or margin < report.min_margin:
            report.min_margin = margin
    else:
        report.failures.append({"x": x, "excess": margin})


def log_grid(lo: float, hi: float, count: int) -> List[float]:
    if count < 2 or not 0 < lo < hi:
        raise ValueError
    ratio = hi / lo
    return [lo * ratio ** (j / (count - 1)) for j in range(count)]


def unit_grid(count: int) -> List[float]:
    """[0,1] grid with refinement points near the boundary equalities."""
    base = {j / (count - 1) for j in range(count)}
    base.update((1e-9, 1e-6, 1e-3, 0.5, 1 - 1e-3, 1 - 1e-6, 1 - 1e-9))
    return sorted(base)


def check_legendre_inequality(k: int, ts: Optional[List[float]] = None,
                              points: int = 1000, t_hi: float = 1e6) -> GridCheckReport:
    """Q_k(t) <= (((t-1)/2)^(k/p) + ((t+1)/2)^(k/p))^p on a t >= 1 grid."""
    if ts is None:
        offsets = log_grid(1e-9, t_hi - 1.0, points - 1)
        ts = [1.0] + [1.0 + u for u in offsets]
    report = GridCheckReport("legendre", k, len(ts))
    for t in ts:
        if t < 1:
            raise ValueError("grid must satisfy t >= 1")
        if t == 1.0:
            if legendre_q(k, 1) != 1:
                report.failures.append({"x": t, "excess": float("nan")})
            else:
                report.equalities.append(t)
            continue

        def lhs(t=t):
            return _legendre_q_iv(k, iv.mpf(t))

        def rhs(t=t):
            tiv = iv.mpf(t)
            p = _pk_iv(k)
            al = iv.mpf(k) / p
            return ipow(ipow((tiv - 1) / 2, al) + ipow((tiv + 1) / 2, al), p)

        _grid_decide(report, t, lhs, rhs)
    return report


def check_key_inequality(k: int, xs: Optional[List[float]] = None,
                         points: int = 1000, x_hi: float = 1e6) -> GridCheckReport:
    """sum_i C(k,i)^2 x^(i p/k) <= (1+x)^p on an x >= 0 grid."""
    if xs is None:
        xs = [0.0] + log_grid(1e-6, x_hi, points - 2) + [1.0]
        xs = sorted(set(xs))
    w = [math.comb(k, i) ** 2 for i in range(k + 1)]
    report = GridCheckReport("key", k, len(xs))
    for x in xs:
        if x < 0:
            raise ValueError("grid must satisfy x >= 0")
        if x == 0.0:
            report.equalities.append(x)     # both sides reduce to 1 exactly
            continue
        if x == 1.0:
            if sum(w) != math.comb(2 * k, k):
                report.failures.append({"x": x, "excess": float("nan")})
            else:
                report.equalities.append(x)
            continue

        def lhs(x=x):
            xiv = iv.mpf(x)
            p = _pk_iv(k)
            total = iv.mpf(0)
            for i in range(k + 1):
                total += w[i] * ipow(xiv, p * i / k)
            return total

        def rhs(x=x):
            return ipow(1 + iv.mpf(x), _pk_iv(k))

        _grid_decide(report, x, lhs, rhs)
    return report


def check_goal_inequality(k: int, grid: Optional[List[float]] = None,
                          points: int = 1000) -> GridCheckReport:
    """(a^(q/k) + (1-a)^(q/k))^k + 2 a^(q/2) (1-a)^(q/2) <= 1 on [0,1].

    Equality at a in {0, 1/2, 1}: at the midpoint both sides collapse to
    (2^k + 2)/2^q = 1 exactly since 2^q is 2^k + 2 by definition.
    """
    if grid is None:
        grid = unit_grid(points)
    report = GridCheckReport("goal", k, len(grid))
    for a in grid:
        if not 0 <= a <= 1:
            raise ValueError("grid must lie in [0,1]")
        if a in (0.0, 0.5, 1.0):
            report.equalities.append(a)
            continue

        def lhs(a=a):
            aiv = iv.mpf(a)
            biv = 1 - aiv
            q = _qk_iv(k)
            return (ipow(aiv, q / k) + ipow(biv, q / k)) ** k + \
                2 * ipow(aiv * biv, q / 2)

        def rhs(a=a):
            return iv.mpf(1)

        _grid_decide(report, a, lhs, rhs)
    return report


def check_two_point_inequality(k: int, xs: Optional[List[float]] = None,
                               points: int = 1000) -> GridCheckReport:
    """2 x^(q/2) y^(q/2) + (x^(q/k) + y^(q/k))^k <= (x+y)^q at y = 1.

    The form is homogeneous of degree q, so fixing y = 1 loses nothing;
    equality happens at x = 0 and x = y = 1 (where both sides are the exact
    integer 2^k + 2).
    """
    if xs is None:
        xs = [0.0] + log_grid(1e-3, 1e3, points - 2) + [1.0]
        xs = sorted(set(xs))
    report = GridCheckReport("two_point", k, len(xs))
    for x in xs:
        if x < 0:
            raise ValueError("grid must satisfy x >= 0")
        if x == 0.0:
            report.equalities.append(x)     # both sides reduce to 1 exactly
            continue
        if x == 1.0:
            if 2 + 2 ** k != 2 ** k + 2:
                report.failures.append({"x": x, "excess": float("nan")})
            else:
                report.equalities.append(x)
            continue

        def lhs(x=x):
            xiv = iv.mpf(x)
            q = _qk_iv(k)
            return 2 * ipow(xiv, q / 2) + (ipow(xiv, q / k) + 1) ** k

        def rhs(x=x):
            return ipow(iv.mpf(x) + 1, _qk_iv(k))

        _grid_decide(report, x, lhs, rhs)
    return report


def check_cfil_instance(k: int, grid: Optional[List[float]] = None,
                        points: int = 1000) -> GridCheckReport:
    """The imported two-point inequality at the single exponent p = q_k/k:

    (a^p + (1-a)^p) (1 + mu^(2/p))^(p-1) <= 1,
    mu = 2 a^(p/2) (1-a)^(p/2) / (a^p + (1-a)^p),

    with equality at a in {0, 1/2, 1}.
    """
    if grid is None:
        grid = unit_grid(points)
    report = GridCheckReport("cfil", k, len(grid))
    for a in grid:
        if not 0 <= a <= 1:
            raise ValueError("grid must lie in [0,1]")
        if a in (0.0, 0.5, 1.0):
            report.equalities.append(a)
            continue

        def lhs(a=a):
            aiv = iv.mpf(a)
            biv = 1 - aiv
            p = _qk_iv(k) / k
            ap = ipow(aiv, p)
            bp = ipow(biv, p)
            s = ap + bp
            mu = 2 * ipow(aiv, p / 2) * ipow(biv, p / 2) / s
            return s * ipow(1 + ipow(mu, 2 / p), p - 1)

        def rhs(a=a):
            return iv.mpf(1)

        _grid_decide(report, a, lhs, rhs)
    return report


def check_convex_concave(k: int, zs: Optional[List[float]] = None,
                         points: int = 1000) -> GridCheckReport:
    """1 + z^(q/2)/2^(k-1) <= (1+z)^(q-k) on [0,1], plus the structural
    facts the proof uses: equality at both endpoints (checked as exact
    rationals), convexity of the left side and concavity of the right side
    via certified second differences on the grid."""
    if zs is None:
        zs = unit_grid(points)
    report = GridCheckReport("convex_concave", k, len(zs))
    half = Fraction(2 ** k + 2, 2 ** k)
    for z in zs:
        if not 0 <= z <= 1:
            raise ValueError("grid must lie in [0,1]")
        if z == 0.0:
            report.equalities.append(z)     # 1 <= 1
            continue
        if z == 1.0:
            if Fraction(1) + Fraction(1, 2 ** (k - 1)) != half:
                report.failures.append({"x": z, "excess": float("nan")})
            else:
                report.equalities.append(z)
            continue

        def lhs(z=z):
            q = _qk_iv(k)
            return 1 + ipow(iv.mpf(z), q / 2) / 2 ** (k - 1)

        def rhs(z=z):
            q = _qk_iv(k)
            return ipow(1 + iv.mpf(z), q - k)

        _grid_decide(report, z, lhs, rhs)

    uniform = [j / (points - 1) for j in range(points)]

    def lhs_at(z):
        if z == 0.0:
            return iv.mpf(1)
        if z == 1.0:
            return to_interval(Fraction(2 ** (k - 1) + 1, 2 ** (k - 1)))
        return 1 + ipow(iv.mpf(z), _qk_iv(k) / 2) / 2 ** (k - 1)

    def rhs_at(z):
        if z == 0.0:
            return iv.mpf(1)
        if z == 1.0:
            return to_interval(half)
        return ipow(1 + iv.mpf(z), _qk_iv(k) - k)

    report.shape_flags["lhs_convex"] = _certify_second_differences(
        uniform, lhs_at, expect_positive=True)
    report.shape_flags["rhs_concave"] = _certify_second_differences(
        uniform, rhs_at, expect_positive=False)
    return report


def _certify_second_differences(xs: List[float], f_at: Callable,
                                expect_positive: bool,
                                start_prec: int = 64, cap: int = 8192) -> bool:
    """Certify the sign of every interior second difference of f on xs."""
    pending = set(range(1, len(xs) - 1))
    prec = start_prec
    while pending and prec <= cap:
        with workprec(prec):
            vals = [f_at(x) for x in xs]
            for i in sorted(pending):
                d2 = vals[i + 1] - 2 * vals[i] + vals[i - 1]
                if expect_positive and d2.a > 0:
                    pending.discard(i)
                elif not expect_positive and d2.b < 0:
                    pending.discard(i)
                elif (expect_positive and d2.b < 0) or \
                        (not expect_positive and d2.a > 0):
                    return False        # certified wrong sign
        prec *= 2
    return not pending


def check_higher_energy_inequalities(k: int, points: int = 1000) -> Dict[str, GridCheckReport]:
    """All four scalar inequalities behind the higher-energy bound."""
    return {
        "two_point": check_two_point_inequality(k, points=points),
        "goal": check_goal_inequality(k, points=points),
        "cfil": check_cfil_instance(k, points=points),
        "convex_concave": check_convex_concave(k, points=points),
    }


# ---------------------------------------------------------------------------
# curves


def _float_pk(k: int) -> float:
    return math.log2(math.comb(2 * k, k))


def _float_qk(k: int) -> float:
    return math.log2(2 ** k + 2)


def curve_data(which: str, k: int, samples: int) -> List[Tuple[float, float]]:
    """Sampled (x, value) rows on [0,1] for the ratio curve (phi), its
    critical-point curve (psi), or the goal-inequality left side (goal)."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    name = {"phi": "phi", "psi": "psi", "goal": "goal", "goal_q": "goal"}.get(which)
    if name is None:
        raise ValueError("unknown curve %r" % (which,))
    xs = [j / (samples - 1) for j in range(samples)]
    w = [math.comb(k, i) ** 2 for i in range(k + 1)]
    out = []
    if name == "phi":
        p = _float_pk(k)
        for x in xs:
            num = sum(w[i] * x ** (p * (k - i) / k) for i in range(k + 1))
            out.append((x, num / (1 + x) ** p))
    elif name == "psi":
        p = _float_pk(k)
        for x in xs:
            val = sum(w[i] * ((k - i) / k * x ** (p * (k - i) / k - 1)
                              - i / k * x ** (p * (k - i) / k))
                      for i in range(k))
            out.append((x, val))
    else:
        q = _float_qk(k)
        for x in xs:
            val = (x ** (q / k) + (1 - x) ** (q / k)) ** k + \
                2 * (x * (1 - x)) ** (q / 2)
            out.append((x, val))
    return out


def psi_at_one_exact(k: int) -> Fraction:
    """psi_k(1) as an exact rational: sum_{i<k} C(k,i)^2 (k-2i)/k."""
    w = [math.comb(k, i) ** 2 for i in range(k)]
    return Fraction(sum(v * (k - 2 * i) for i, v in enumerate(w)), k)


@dataclass
class PsiShapeReport:
    k: int
    samples: int
    negative: int
    positive_indices: List[Tuple[int, float]]
    undecided_indices: List[int]

    @property
    def concave_certified(self) -> bool:
        return not self.positive_indices and not self.undecided_indices

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "samples": self.samples,
            "negative": self.negative,
            "positive_indices": [[i, x] for i, x in self.positive_indices],
            "undecided_indices": self.undecided_indices,
            "concave_certified": self.concave_certified,
        }


def certify_psi_shape(k: int, samples: int = 512,
                      start_prec: int = 64, cap: int = 8192) -> PsiShapeReport:
    """Certified signs of the second differences of psi_k on a uniform grid.

    Every interior index ends up certified negative, certified positive, or
    undecided at the precision cap; nothing is classified by rounding.
    """
    xs = [j / (samples - 1) for j in range(samples)]
    w = [math.comb(k, i) ** 2 for i in range(k)]

    def psi_at(x):
        if x == 0.0:
            return iv.mpf(0)
        p = _pk_iv(k)
        xiv = iv.mpf(x)
        total = iv.mpf(0)
        for i in range(k):
            e = p * (k - i) / k
            total += w[i] * (iv.mpf(k - i) / k * ipow(xiv, e - 1)
                             - iv.mpf(i) / k * ipow(xiv, e))
        return total

    pending = set(range(1, samples - 1))
    negative = 0
    positive: List[Tuple[int, float]] = []
    prec = start_prec
    while pending and prec <= cap:
        with workprec(prec):
            vals = [psi_at(x) for x in xs]
            for i in sorted(pending):
                d2 = vals[i + 1] - 2 * vals[i] + vals[i - 1]
                if d2.b < 0:
                    negative += 1
                    pending.discard(i)
                elif d2.a > 0:
                    positive.append((i, xs[i]))
                    pending.discard(i)
        prec *= 2
    return PsiShapeReport(k, samples, negative, positive, sorted(pending))


def check_pk_bound(k_max: int) -> dict:
    """C(2k,k) < 2^(2k-1) for k = 2..k_max, by exact integer comparison."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    failures = []
    m = 2     # C(2,1)
    for k in range(2, k_max + 1):
        m = m * 2 * (2 * k - 1) // k
        if not m < 1 << (2 * k - 1):
            failures.append(k)
    return {"k_max": k_max, "failures": failures, "ok": not failures}
