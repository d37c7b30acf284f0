import pytest
from hypothesis import assume, given, strategies as st
from sympy import Rational

from app.services.errors import BadReduction, InvalidFamily, InvalidParameter, NotCoprime, WrongCongruence
from app.services.ffield import build_field
from app.services.legendre_curves import (
    CurveFamily,
    CurveInstance,
    LPolynomial,
    _newton_coefficients,
    charsum_new,
    check_366_trace_identity,
    check_p1_coefficients,
    chi_minus3,
    count_points_brute,
    count_points_hgf,
    dim_Vn,
    elliptic_trace,
    family_from_parameters,
    frobenius_trace_new,
    genus,
    good_primes,
    hypergeometric_parameters,
    l_polynomial,
    parse_lambda,
    schwarz_angles,
    verify_charsum_hgf,
    weil_check,
)

LPOLY_ROWS = {
    7: [1, 0, 0, 0, -2, 0, 0, 0, 2401],
    11: [1, -8, 68, -296, 1270, -3256, 8228, -10648, 14641],
    13: [1, 0, 0, 0, 338, 0, 0, 0, 28561],
    17: [1, 0, 0, 0, 178, 0, 0, 0, 83521],
    19: [1, 0, 1, 0, -59, 0, 361, 0, 130321],
    31: [1, 2, 63, 124, 2945, 3844, 60543, 59582, 923521],
    41: [1, 2, 103, 184, 6045, 7544, 173143, 137842, 2825761],
}


@st.composite
def families(draw):
    N = draw(st.integers(2, 12))
    i, j, k = (draw(st.integers(1, N - 1)) for _ in range(3))
    try:
        return CurveFamily(N, i, j, k)
    except InvalidFamily:
        assume(False)


def test_family_validation():
    with pytest.raises(InvalidFamily):
        CurveFamily(1, 1, 1, 1)
    with pytest.raises(InvalidFamily):
        CurveFamily(6, 0, 3, 1)
    with pytest.raises(InvalidFamily):
        CurveFamily(6, 2, 4, 2)
    fam = CurveFamily(6, 4, 3, 1)
    assert fam.label == "[6;4,3,1]"
    assert fam.units() == [1, 5]
    assert not fam.divides_ij and not fam.divides_ijk


@pytest.mark.parametrize("family, expected", [((6, 4, 3, 1), 3), ((3, 1, 2, 1), 2), ((5, 1, 4, 1), 4), ((2, 1, 1, 1), 1)])
def test_genus(family, expected):
    assert genus(CurveFamily(*family)) == expected


def test_eigenspace_dimensions(family_6431):
    assert dim_Vn(family_6431, 1) == 1
    assert dim_Vn(family_6431, 5) == 1
    with pytest.raises(NotCoprime):
        dim_Vn(family_6431, 2)


@given(families())
def test_eigenspace_dimensions_pair_up(fam):
    assume(not fam.divides_ijk)
    for n in fam.units():
        assert dim_Vn(fam, n) + dim_Vn(fam, fam.N - n) == 2


@given(families())
def test_parameter_conversion_round_trip(fam):
    assert family_from_parameters(*hypergeometric_parameters(fam)) == fam


def test_schwarz_angles(family_6431):
    params = hypergeometric_parameters(family_6431)
    assert params == (Rational(1, 6), Rational(1, 3), Rational(5, 6))
    angles, denominators = schwarz_angles(*params)
    assert angles == (Rational(1, 6), Rational(1, 3), Rational(1, 6))
    assert denominators == (6, 3, 6)


def test_parse_lambda():
    assert parse_lambda("2/1") == 2
    assert parse_lambda(" 3/4 ") == Rational(3, 4)
    with pytest.raises(InvalidParameter):
        parse_lambda("two")


def test_lambda_excludes_zero_and_one(family_3121):
    for lam in (0, 1):
        with pytest.raises(InvalidParameter):
            CurveInstance(family_3121, lam)


@pytest.mark.parametrize("family, p", [((6, 4, 3, 1), 7), ((6, 4, 3, 1), 13), ((3, 1, 2, 1), 7), ((5, 1, 4, 1), 11), ((4, 1, 2, 2), 13)])
def test_brute_force_and_hypergeometric_counts_agree(family, p):
    fam = CurveFamily(*family)
    f = build_field(p)
    for lam in range(2, p):
        inst = CurveInstance(fam, lam)
        assert count_points_brute(inst, f).total == count_points_hgf(inst, f).total, lam


def test_counts_over_extension_field(family_3121):
    inst = CurveInstance(family_3121, 2)
    f = build_field(5, 2)
    assert count_points_brute(inst, f).total == count_points_hgf(inst, f).total


def test_hypergeometric_count_needs_roots_of_unity(family_3121):
    with pytest.raises(WrongCongruence):
        count_points_hgf(CurveInstance(family_3121, 2), build_field(11))


def test_bad_reduction(family_3121):
    with pytest.raises(BadReduction):
        count_points_brute(CurveInstance(family_3121, 8), build_field(7))
    with pytest.raises(BadReduction):
        count_points_brute(CurveInstance(family_3121, Rational(1, 7)), build_field(7))
    assert good_primes(CurveInstance(family_3121, 2), [2, 3, 5, 7, 11]) == [5, 7, 11]


def test_character_sum_matches_hypergeometric_term(family_6431):
    inst = CurveInstance(family_6431, 3)
    f = build_field(13)
    for m in range(1, 6):
        holds, witness = verify_charsum_hgf(inst, f, m)
        assert holds, witness
    with pytest.raises(NotCoprime):
        charsum_new(inst, f, 2)


@pytest.mark.parametrize("p, total, trace, a_p", [(7, 10, -2, -1), (13, 22, -8, -4)])
def test_genus_two_trace_against_elliptic_curve(family_3121, p, total, trace, a_p):
    inst = CurveInstance(family_3121, 2)
    f = build_field(p)
    assert count_points_brute(inst, f).total == total
    assert frobenius_trace_new(inst, f) == trace
    assert elliptic_trace(2, p) == a_p
    assert trace == a_p * (1 + chi_minus3(p))


@pytest.mark.parametrize("p", [5, 11, 17, 23])
def test_trace_vanishes_when_p_is_2_mod_3(family_3121, p):
    assert frobenius_trace_new(CurveInstance(family_3121, 2), build_field(p)) == 0


def test_elliptic_bad_reduction():
    with pytest.raises(BadReduction):
        elliptic_trace(8, 7)


def test_sextic_trace_identity():
    holds, witness = check_366_trace_identity(2, 7)
    assert holds, witness


def test_sextic_identity_preconditions():
    with pytest.raises(WrongCongruence):
        check_366_trace_identity(2, 11)
    with pytest.raises(BadReduction):
        check_366_trace_identity(8, 7)


def test_coefficient_comparison_as_polynomials_in_s():
    holds, witness = check_p1_coefficients(13)
    assert holds, witness


def test_newton_identities_round_trip():
    # prod (1 - a T) over a = 1, 2, 3
    assert _newton_coefficients([6, 14, 36]) == [1, -6, 11, -6]


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
def test_newton_identities_recover_coefficients(tail):
    coeffs = [1] + tail
    power_sums = []
    for k in range(1, len(coeffs)):
        power_sums.append(-k * coeffs[k] - sum(power_sums[i - 1] * coeffs[k - i] for i in range(1, k)))
    assert _newton_coefficients(power_sums) == coeffs


@pytest.mark.parametrize("p", [7, 11, 13, 17, 19])
def test_l_polynomial_table(family_5141, p):
    lpoly = l_polynomial(CurveInstance(family_5141, 2), p)
    assert lpoly.g == 4
    assert list(lpoly.coeffs) == LPOLY_ROWS[p]


@pytest.mark.slow
@pytest.mark.parametrize("p", [31, 41])
def test_l_polynomial_table_large_primes(family_5141, p):
    assert list(l_polynomial(CurveInstance(family_5141, 2), p).coeffs) == LPOLY_ROWS[p]


def test_l_polynomial_of_genus_two_curve(family_3121):
    lpoly = l_polynomial(CurveInstance(family_3121, 2), 7)
    assert lpoly.trace == -2
    assert lpoly.coeffs[0] == 1 and lpoly.coeffs[4] == 49
    assert weil_check(lpoly)[0]


def test_weil_check_rejects_bad_polynomial():
    ok, deviation = weil_check(LPolynomial(p=7, g=1, coeffs=(1, 10, 7)))
    assert not ok
    assert deviation > 0.1
