"""Exact additive and higher energies on subsets of discrete cubes, with
certified sign and inequality machinery for the sharp energy exponents and
lower-bound experiments for the discrete extension constant."""

from .energy import (DecompositionReport, EnergyKind, EnergyValue,
                     SplitDecomposition, additive_energy, brute_force_energy,
                     bullet_product, decomposition_identity_check, energy,
                     full_cube_energy, higher_energy,
                     interval_energy_closed_form, split_last_coordinate)
from .errors import (BudgetExceeded, DimensionMismatch, ParseError,
                     PrecisionExhausted)
from .extension import (ComparisonReport, DEEstimate, DEProblem,
                        DyadicDecomposition, TensorizationReport,
                        comparison_check, critical_exponent_lower_bound,
                        de_ratio, dyadic_decompose, lq_norm, optimize_de,
                        restricted_enumeration, tensorization_check,
                        three_point_condition_root, three_point_separation,
                        tn_interval, weighted_energy)
from .lattice import (CountsMap, PointSet, WeightFn, convolve,
                      convolve_weights, correlate, indicator,
                      iterate_convolve, pack_points, parse_points_auto,
                      parse_points_json, parse_points_text, points_to_json,
                      points_to_text, power_pointwise, reflect, sum_values)
from .legendre import (CoeffLinearForm, ExactAlpha, GridCheckReport,
                       PsiShapeReport, SignCertificate, certify_psi_shape,
                       certify_sign_pattern, check_cfil_instance,
                       check_convex_concave, check_goal_inequality,
                       check_higher_energy_inequalities, check_key_inequality,
                       check_legendre_inequality, check_pk_bound,
                       check_two_point_inequality, coefficient_form,
                       coefficient_forms, compare_alpha, curve_data,
                       legendre_q, numerator_positive_at_one, psi_at_one_exact,
                       sign_of_coefficient, sign_table,
                       weight_balance_identity)
from .verify import (ExponentTarget, VerificationReport, WitnessSearchReport,
                     energy_threshold, equality_witnesses, sweep_cube,
                     witness_search_general_cube)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CoeffLinearForm",
    "ComparisonReport",
    "CountsMap",
    "DEEstimate",
    "DEProblem",
    "DecompositionReport",
    "DimensionMismatch",
    "DyadicDecomposition",
    "EnergyKind",
    "EnergyValue",
    "ExactAlpha",
    "ExponentTarget",
    "GridCheckReport",
    "ParseError",
    "PointSet",
    "PrecisionExhausted",
    "PsiShapeReport",
    "SignCertificate",
    "SplitDecomposition",
    "TensorizationReport",
    "VerificationReport",
    "WeightFn",
    "WitnessSearchReport",
    "additive_energy",
    "brute_force_energy",
    "bullet_product",
    "certify_psi_shape",
    "certify_sign_pattern",
    "check_cfil_instance",
    "check_convex_concave",
    "check_goal_inequality",
    "check_higher_energy_inequalities",
    "check_key_inequality",
    "check_legendre_inequality",
    "check_pk_bound",
    "check_two_point_inequality",
    "coefficient_form",
    "coefficient_forms",
    "compare_alpha",
    "comparison_check",
    "convolve",
    "convolve_weights",
    "correlate",
    "critical_exponent_lower_bound",
    "curve_data",
    "de_ratio",
    "decomposition_identity_check",
    "dyadic_decompose",
    "energy",
    "energy_threshold",
    "equality_witnesses",
    "full_cube_energy",
    "higher_energy",
    "indicator",
    "interval_energy_closed_form",
    "iterate_convolve",
    "legendre_q",
    "lq_norm",
    "numerator_positive_at_one",
    "optimize_de",
    "pack_points",
    "parse_points_auto",
    "parse_points_json",
    "parse_points_text",
    "points_to_json",
    "points_to_text",
    "power_pointwise",
    "psi_at_one_exact",
    "reflect",
    "restricted_enumeration",
    "sign_of_coefficient",
    "sign_table",
    "split_last_coordinate",
    "sum_values",
    "sweep_cube",
    "tensorization_check",
    "three_point_condition_root",
    "three_point_separation",
    "tn_interval",
    "weight_balance_identity",
    "weighted_energy",
    "witness_search_general_cube",
]
