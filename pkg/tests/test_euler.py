from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mzvkit.euler import (
    certificate_from_json_dict,
    certificate_to_json_dict,
    coefficient_four_term_check,
    coset_four_term_check,
    coset_lambda_tables,
    depth_one_bernoulli_value,
    filtration_check,
    four_term_poly,
    four_term_poly_coeffs,
    make_certificate,
    poly_eval,
    vanishing_check,
)
from mzvkit.exact import INFINITY, padic_valuation
from mzvkit.measures import Coset, LevelMeasure, moment
from mzvkit.series import LambdaTable
from mzvkit.synth import four_term_kernel, random_kernel_measure


def frac_poly(*coeffs):
    return tuple(Fraction(c) for c in coeffs)


def test_four_term_poly_ground_truths():
    assert four_term_poly(0, "even") == ()
    assert four_term_poly(0, "odd") == ()
    assert four_term_poly(1, "even") == ()
    assert four_term_poly(1, "odd") == frac_poly(-2)
    assert four_term_poly(2, "even") == frac_poly(0, -4)
    assert four_term_poly(2, "odd") == frac_poly(-2)
    assert four_term_poly(3, "odd") == frac_poly(-2, 0, -6)


def test_four_term_poly_rejects_bad_input():
    with pytest.raises(ValueError):
        four_term_poly(-1, "even")
    with pytest.raises(ValueError):
        four_term_poly(2, "weird")


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("a", range(1, 13))
def test_expansion_matches_direct_polynomial(a, parity):
    assert four_term_poly_coeffs(a, parity) == four_term_poly(a, parity)


def test_poly_eval_horner():
    assert poly_eval(frac_poly(1, 0, 3), 2) == 13
    assert poly_eval((), 5) == 0
    assert poly_eval(frac_poly(Fraction(1, 2)), 7) == Fraction(1, 2)


def test_certificate_base_cases():
    odd_prefix = make_certificate((1, 0))
    assert odd_prefix.combination == ((2, Fraction(-1, 2)),)
    assert odd_prefix.m_parity == "odd"
    even_prefix = make_certificate((1,))
    assert even_prefix.combination == ((2, Fraction(-1, 4)),)
    assert even_prefix.m_parity == "even"
    assert even_prefix.slack(2) == 2
    assert even_prefix.slack(3) == 0


def test_certificate_recursion_step():
    cert = make_certificate((2, 2, 3))
    assert cert.final_exponent == 3
    assert cert.prefix_sum == 4
    assert dict(cert.combination) == {2: Fraction(1, 4), 4: Fraction(-1, 8)}
    assert cert.slack(2) == 3


@pytest.mark.parametrize("a", range(8))
def test_certificate_replay_recovers_monomial(a):
    # the prefix fixes the parity; pick the one that makes m + a odd
    prefix = (1,) if a % 2 == 0 else (2,)
    cert = make_certificate((*prefix, a))
    expected = tuple(Fraction(0) for _ in range(a)) + (Fraction(1),)
    assert cert.replay() == expected


def test_certificate_parity_rejection():
    with pytest.raises(ValueError):
        make_certificate((1, 1))
    with pytest.raises(ValueError):
        make_certificate((2,))
    with pytest.raises(ValueError):
        make_certificate(())
    with pytest.raises(ValueError):
        make_certificate((-1, 2))


def test_certificate_json_round_trip():
    cert = make_certificate((2, 2, 3))
    data = certificate_to_json_dict(cert, 2)
    assert data["target"] == [2, 2, 3]
    assert data["slack"] == 3
    assert {entry["q"] for entry in data["combination"]} == {2, 4}
    assert certificate_from_json_dict(data) == cert


def test_vanishing_check_constant_measure():
    verdict = vanishing_check(LevelMeasure.constant(3, 1, 1), (1,))
    assert verdict.valuation == 1
    assert verdict.threshold == 1
    assert verdict.passed


def test_vanishing_check_zero_measure():
    # the a = 2 combination carries a coefficient 1/6, so slack at p = 3 is 1
    verdict = vanishing_check(LevelMeasure.zero(3, 2, 2), (1, 2))
    assert verdict.valuation == INFINITY
    assert verdict.passed
    assert verdict.to_json_dict() == {"valuation": "inf", "threshold": 1, "pass": True}


def test_vanishing_check_slack_lowers_threshold():
    # at p = 2 the base certificate carries denominator 4, so the bound drops by 2
    verdict = vanishing_check(LevelMeasure.constant(2, 2, 1), (1,))
    assert verdict.valuation == 1
    assert verdict.threshold == 0
    assert verdict.passed


def test_vanishing_check_validation():
    mu = LevelMeasure.constant(3, 1, 1)
    with pytest.raises(ValueError):
        vanishing_check(mu, (2,))
    with pytest.raises(ValueError):
        vanishing_check(mu, (1, 1))
    with pytest.raises(ValueError):
        vanishing_check(LevelMeasure.point_mass(3, 1, 1, (1,)), (1,))
    with pytest.raises(ValueError):
        vanishing_check(LevelMeasure.constant(3, 1, 1, Fraction(1, 2)), (1,))


def test_even_exponent_sum_has_no_congruence():
    # the parity hypothesis is sharp: an even word can land at valuation 0
    mu = LevelMeasure.constant(3, 1, 1)
    value = moment(mu, (0, 2))
    assert value == 5
    assert padic_valuation(value, 3) == 0


def test_validate_flag_does_not_change_verdicts():
    mu = random_kernel_measure(3, 2, 1, seed=11)
    for exponents in [(1,), (3,), (5,)]:
        assert vanishing_check(mu, exponents) == vanishing_check(
            mu, exponents, validate=False
        )


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    exponents=st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(
        lambda e: sum(e) % 2
    ),
)
def test_vanishing_holds_on_random_kernel_measures(seed, exponents):
    mu = random_kernel_measure(3, 1, 2, seed=seed)
    assert vanishing_check(mu, exponents).passed


def test_coset_check_zero_measure():
    verdict = coset_four_term_check(
        LevelMeasure.zero(3, 2, 1), Coset((0,), 1), (1,)
    )
    assert verdict.valuation == INFINITY
    assert verdict.threshold == 2
    assert verdict.passed


def test_coset_check_point_mass_mod_two():
    mu = LevelMeasure.point_mass(2, 1, 1, (0,))
    verdict = coset_four_term_check(mu, Coset((0,), 1), (1,))
    assert verdict.valuation == INFINITY
    assert verdict.passed


def test_coset_check_full_level_coset():
    mu = random_kernel_measure(3, 2, 1, seed=5)
    verdict = coset_four_term_check(mu, Coset((1,), 2), (2,))
    assert verdict.threshold == 2
    assert verdict.passed


def test_coset_check_all_bases_and_parities():
    mu = random_kernel_measure(3, 1, 1, seed=9)
    for base in range(3):
        for exponents in [(0,), (1,), (2,), (3,)]:
            assert coset_four_term_check(mu, Coset((base,), 1), exponents).passed


def test_coset_check_validation():
    mu = LevelMeasure.constant(3, 1, 1)
    with pytest.raises(ValueError):
        coset_four_term_check(mu, Coset((0,), 1), (1, 1))
    with pytest.raises(ValueError):
        coset_four_term_check(mu, Coset((0,), 1), (-1,))
    with pytest.raises(ValueError):
        coset_four_term_check(
            LevelMeasure.point_mass(3, 1, 1, (1,)), Coset((0,), 1), (1,)
        )


def test_coset_tables_pass_combination_check():
    mu = random_kernel_measure(3, 2, 1, seed=3)
    for exponents in [(1,), (2,)]:
        tables = coset_lambda_tables(mu, exponents, 1)
        verdict = coefficient_four_term_check(tables, sum(exponents), 3, 1)
        assert verdict.passed


def test_coset_tables_expose_perturbation():
    # adding one unit of mass at (1,) leaves the kernel, and the normalized
    # combination picks it up at valuation 0
    mu = random_kernel_measure(3, 1, 1, seed=3)
    broken = mu + LevelMeasure.point_mass(3, 1, 1, (1,))
    tables = coset_lambda_tables(broken, (1,), 1)
    verdict = coefficient_four_term_check(tables, 1, 3, 1)
    assert not verdict.passed
    assert verdict.valuation == 0


def test_coset_tables_zero_measure_pass():
    tables = coset_lambda_tables(LevelMeasure.zero(3, 1, 1), (1,), 1)
    verdict = coefficient_four_term_check(tables, 1, 3, 5)
    assert verdict.valuation == INFINITY
    assert verdict.passed


def test_coefficient_check_rejects_mismatched_tables():
    shared = {(0,): Fraction(0)}
    with pytest.raises(ValueError):
        coefficient_four_term_check(
            (shared, shared, shared, {(1,): Fraction(0)}), 1, 3, 1
        )


def test_coset_tables_normalize_by_factorials():
    mu = LevelMeasure.point_mass(3, 1, 1, (2,))
    tables = coset_lambda_tables(mu, (3,), 1)
    # identity pattern at base 2: integrand 2^3 over factorial 3!
    assert tables[0][(2,)] == Fraction(8, 6)


def test_filtration_report_verdicts():
    report = filtration_check(
        [
            LambdaTable(3, 1, 1, {}),
            LambdaTable(3, 1, 2, {}),
            LambdaTable(3, 2, 1, {(0,): Fraction(1)}),
        ]
    )
    assert report.levels == (1, 2)
    assert report.depths == (1, 2)
    assert report.exact_verdict(1, 1)
    assert report.cumulative_verdict(1, 2)
    assert not report.exact_verdict(2, 1)
    assert not report.uniform_verdict(1)
    assert report.uniform_verdict(0)


def test_filtration_depth_cap_skips_deeper_tables():
    report = filtration_check(
        [LambdaTable(3, 1, 1, {}), LambdaTable(3, 1, 2, {(0, 0): Fraction(2)})],
        k=1,
    )
    assert report.depths == (1,)
    assert report.uniform_verdict(1)


def test_filtration_merges_same_cell():
    report = filtration_check(
        [LambdaTable(3, 1, 1, {}), LambdaTable(3, 1, 1, {(1,): Fraction(1)})]
    )
    assert not report.exact_verdict(1, 1)
    data = report.to_json_dict()
    assert data["cells"] == [{"level": 1, "depth": 1, "zero": False}]


def test_depth_one_bernoulli_value_examples():
    for n in range(1, 11):
        assert depth_one_bernoulli_value(1, n) == 0
    assert depth_one_bernoulli_value(2, 1) == Fraction(-1, 8)
    assert depth_one_bernoulli_value(2, 2) == Fraction(1, 96)
    with pytest.raises(ValueError):
        depth_one_bernoulli_value(2, 0)


def test_kernel_basis_elements_satisfy_vanishing():
    basis = four_term_kernel(3, 1, 2)
    for vector in basis.vectors:
        for exponents in [(0, 1), (1, 2), (3, 0)]:
            assert vanishing_check(vector, exponents).passed
