"""Sign certification, Legendre-type polynomials, and certified grid checks."""

import math
import random
from fractions import Fraction

import pytest

from cubenergy.legendre import (
    ExactAlpha,
    certify_psi_shape,
    certify_sign_pattern,
    check_convex_concave,
    check_goal_inequality,
    check_higher_energy_inequalities,
    check_key_inequality,
    check_legendre_inequality,
    check_pk_bound,
    check_two_point_inequality,
    coefficient_forms,
    compare_alpha,
    curve_data,
    legendre_q,
    log_grid,
    numerator_positive_at_one,
    psi_at_one_exact,
    sign_of_coefficient,
    sign_table,
    weight_balance_identity,
)


# ---------------------------------------------------------------------------
# exact comparisons against alpha = k / log2 C(2k, k)


def test_exact_alpha_values():
    a = ExactAlpha.for_k(2)
    assert a.k == 2 and a.central == 6
    assert abs(a.float_value() - 2 / math.log2(6)) < 1e-15


def test_compare_alpha_frozen():
    a = ExactAlpha.for_k(2)
    assert compare_alpha(a, 1, 1) == "<"
    assert compare_alpha(a, 3, 4) == ">"
    assert compare_alpha(a, 7, 9) == "<"
    assert compare_alpha(a, 0, 5) == ">"
    assert compare_alpha(a, -1, 2) == ">"
    # negative denominators are normalized
    assert compare_alpha(a, -3, -4) == ">"


def test_compare_alpha_agrees_with_floats_when_far():
    rng = random.Random(61)
    for k in (2, 3, 5, 8):
        a = ExactAlpha.for_k(k)
        af = a.float_value()
        for _ in range(60):
            num = rng.randint(-50, 200)
            den = rng.randint(1, 120)
            frac = num / den
            if abs(frac - af) < 1e-6:
                continue
            want = "<" if af < frac else ">"
            assert compare_alpha(a, num, den) == want, (k, num, den)


def test_compare_alpha_is_monotone_consistent():
    a = ExactAlpha.for_k(3)
    rng = random.Random(67)
    pairs = sorted({(rng.randint(1, 300), rng.randint(1, 300)) for _ in range(40)},
                   key=lambda nd: Fraction(nd[0], nd[1]))
    results = [compare_alpha(a, n, d) for n, d in pairs]
    # once alpha drops below the fraction it stays below all larger ones
    seen_less = False
    for r in results:
        if r == "<":
            seen_less = True
        else:
            assert not seen_less


def test_compare_alpha_decides_tight_convergents():
    # continued-fraction style approximations force the exact integer branch
    for k in (2, 3, 4):
        a = ExactAlpha.for_k(k)
        af = Fraction(a.float_value()).limit_denominator(10 ** 6)
        out = compare_alpha(a, af.numerator, af.denominator)
        assert out in "<>"


# ---------------------------------------------------------------------------
# coefficient linear forms


def test_coefficient_forms_k2_frozen():
    forms = coefficient_forms(2)
    assert [(f.alpha_coeff, f.const_coeff) for f in forms] == \
        [(0, 0), (8, -8), (20, -8), (8, -8), (0, 0)]


def test_forms_palindromic_and_endpoints_vanish():
    for k in range(2, 26):
        forms = coefficient_forms(k)
        assert len(forms) == 2 * k + 1
        assert forms[0].alpha_coeff == forms[0].const_coeff == 0
        assert forms[-1].alpha_coeff == forms[-1].const_coeff == 0
        for i in range(2 * k + 1):
            mate = forms[2 * k - i]
            assert (forms[i].alpha_coeff, forms[i].const_coeff) == \
                (mate.alpha_coeff, mate.const_coeff)


def test_weight_balance_identity():
    for k in range(2, 41):
        assert weight_balance_identity(k)
        w = [math.comb(k, i) ** 2 for i in range(k + 1)]
        assert sum(v * (k - i) for i, v in enumerate(w)) == \
            sum(v * i for i, v in enumerate(w))


def test_numerator_positive_at_one():
    for k in range(2, 21):
        assert numerator_positive_at_one(k)


def test_sign_of_coefficient_matches_float_evaluation():
    for k in range(2, 13):
        a = ExactAlpha.for_k(k).float_value()
        for i in range(1, 2 * k):
            form = coefficient_forms(k)[i]
            val = form.alpha_coeff * a + form.const_coeff
            assert abs(val) > 1e-6, "grid too close to a sign change"
            assert sign_of_coefficient(k, i) == (1 if val > 0 else -1)


def test_sign_pattern_frozen_table():
    # interior signs of the first half, certified exactly
    want_neg_prefix = {2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 2, 8: 2, 9: 3, 10: 3}
    for cert in sign_table(2, 10):
        prefix = 0
        for s in cert.signs:
            if s < 0:
                prefix += 1
            else:
                break
        assert prefix == want_neg_prefix[cert.k]
        assert all(s > 0 for s in cert.signs[prefix:])
        assert cert.sign_changes == 1
        assert cert.certified


def test_sign_pattern_certified_through_k30():
    for k in range(2, 31):
        cert = certify_sign_pattern(k)
        assert cert.at_most_one_change
        assert cert.palindromic and cert.endpoints_vanish
        assert cert.balance_identity and cert.value_at_one_positive
        assert cert.certified


def test_binomial_midpoint_bound():
    rep = check_pk_bound(200)
    assert rep["ok"] and rep["failures"] == []
    with pytest.raises(ValueError):
        check_pk_bound(1)


# ---------------------------------------------------------------------------
# Legendre-type polynomial values


def test_legendre_q_classical_values():
    assert legendre_q(2, 1) == 1
    assert legendre_q(4, 1) == 1
    assert legendre_q(2, Fraction(1, 2)) == Fraction(-1, 8)
    assert legendre_q(3, 2) == 17
    for k in range(2, 15):
        assert legendre_q(k, 1) == 1
        assert legendre_q(k, -1) == (-1) ** k


def test_legendre_q_three_term_recurrence():
    # (j+1) Q_{j+1}(t) = (2j+1) t Q_j(t) - j Q_{j-1}(t), exact in rationals
    rng = random.Random(71)
    for _ in range(10):
        t = Fraction(rng.randint(-8, 8), rng.randint(1, 8))
        for j in range(1, 6):
            lhs = (j + 1) * legendre_q(j + 1, t)
            rhs = (2 * j + 1) * t * legendre_q(j, t) - j * legendre_q(j - 1, t)
            assert lhs == rhs


def test_psi_normalization_is_exactly_one():
    for k in range(2, 31):
        assert psi_at_one_exact(k) == 1


# ---------------------------------------------------------------------------
# certified grid checks


def test_legendre_grid_check():
    for k in (2, 3):
        rep = check_legendre_inequality(k, points=80)
        assert rep.ok and not rep.failures and not rep.undecided
        assert 1.0 in rep.equalities
        assert rep.min_margin > 0


def test_key_grid_check():
    rep = check_key_inequality(2, points=80)
    assert rep.ok
    assert 0.0 in rep.equalities and 1.0 in rep.equalities


def test_goal_grid_check():
    rep = check_goal_inequality(3, grid=None, points=80)
    assert rep.ok
    for x in (0.0, 0.5, 1.0):
        assert x in rep.equalities


def test_two_point_grid_check():
    rep = check_two_point_inequality(3, points=80)
    assert rep.ok
    assert 0.0 in rep.equalities and 1.0 in rep.equalities


def test_convex_concave_grid_check():
    rep = check_convex_concave(3, points=60)
    assert rep.ok
    assert 0.0 in rep.equalities and 1.0 in rep.equalities
    assert rep.shape_flags.get("lhs_convex") and rep.shape_flags.get("rhs_concave")


def test_higher_energy_inequality_bundle():
    for k in (2, 4):
        reports = check_higher_energy_inequalities(k, points=60)
        assert set(reports) == {"two_point", "goal", "cfil", "convex_concave"}
        for name, rep in reports.items():
            assert rep.ok, (k, name)


def test_log_grid_validation():
    with pytest.raises(ValueError):
        log_grid(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        log_grid(1.0, 2.0, 1)
    g = log_grid(1e-3, 1e3, 7)
    assert len(g) == 7 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(1e3)


def test_legendre_grid_rejects_bad_domain():
    with pytest.raises(ValueError):
        check_legendre_inequality(2, ts=[0.5])


# ---------------------------------------------------------------------------
# curve extraction and shape certification


def test_curve_data_endpoints():
    phi = dict(curve_data("phi", 3, 65))
    assert phi[0.0] == pytest.approx(1.0, abs=1e-12)
    assert phi[1.0] == pytest.approx(1.0, abs=1e-12)
    psi = dict(curve_data("psi", 3, 65))
    assert psi[0.0] == pytest.approx(0.0, abs=1e-12)
    assert psi[1.0] == pytest.approx(1.0, abs=1e-9)


def test_curve_data_goal_stays_below_one():
    for k in (2, 4, 8):
        rows = curve_data("goal", k, 129)
        assert max(y for _, y in rows) <= 1.0 + 1e-12


def test_curve_data_rejects_unknown():
    with pytest.raises(ValueError):
        curve_data("nope", 3, 16)


def test_psi_shape_certification():
    rep3 = certify_psi_shape(3, samples=128)
    assert rep3.concave_certified
    assert rep3.negative == 126 and not rep3.undecided_indices

    rep7 = certify_psi_shape(7, samples=128)
    assert not rep7.concave_certified
    assert rep7.positive_indices and not rep7.undecided_indices
    first_x = rep7.positive_indices[0][1]
    assert 0.05 < first_x < 0.2
