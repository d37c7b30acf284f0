import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Rational

from app.services.charsums import (
    CycNumber,
    character,
    character_quotient_test,
    divide_exact,
    gauss_sum,
    gauss_sum_numeric,
    hasse_davenport_check,
    jacobi_sum,
    jacobi_table,
    power_basis,
    root_exponent,
)
from app.services.errors import (
    ExtensionFieldExactUnsupported,
    FieldMismatch,
    InvalidParameter,
    NonIntegerTotal,
    NonUnitQuotient,
    WrongCongruence,
)
from app.services.ffield import build_field

cyclotomic_12 = st.lists(st.integers(-6, 6), min_size=4, max_size=4).map(lambda c: CycNumber(12, c))


def test_power_basis_reduces_modulo_cyclotomic_polynomial():
    basis = power_basis(6)
    # zeta_6^2 = zeta_6 - 1 and zeta_6^3 = -1
    assert list(basis[2]) == [-1, 1]
    assert list(basis[3]) == [-1, 0]


@given(cyclotomic_12, cyclotomic_12, cyclotomic_12)
def test_cyclotomic_ring_laws(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x - x).is_zero()
    assert (x * y) * z == x * (y * z)


@given(cyclotomic_12, st.sampled_from([1, 5, 7, 11]))
def test_galois_action_is_a_ring_map(x, t):
    y = CycNumber.root_of_unity(12, 1) + 2
    assert (x * y).galois(t) == x.galois(t) * y.galois(t)


def test_roots_of_unity():
    zeta = CycNumber.root_of_unity(12, 1)
    assert zeta ** 12 == 1
    assert zeta ** 6 == -1
    assert zeta.galois(5) == CycNumber.root_of_unity(12, 5)
    assert zeta.conj() == CycNumber.root_of_unity(12, 11)
    assert root_exponent(CycNumber.root_of_unity(12, 7), 12) == 7
    assert root_exponent(CycNumber.from_int(2, 12), 12) is None


def test_lift_embeds_smaller_cyclotomic_ring():
    zeta6 = CycNumber.root_of_unity(6, 1)
    assert zeta6.lift(12) == CycNumber.root_of_unity(12, 2)
    assert zeta6 == CycNumber.root_of_unity(12, 2)


def test_to_int():
    assert CycNumber.from_int(5, 6).to_int() == 5
    with pytest.raises(NonIntegerTotal):
        CycNumber.root_of_unity(6, 1).to_int()


def test_mismatched_p_parts():
    a = gauss_sum(character(build_field(7), 6, 1))
    b = gauss_sum(character(build_field(13), 6, 1))
    with pytest.raises(FieldMismatch):
        a + b


def test_character_is_multiplicative(f13):
    chi = character(f13, 12, 5)
    for x in range(1, 13):
        for y in range(1, 13):
            assert chi(x) * chi(y) == chi((x * y) % 13)
    assert chi(0).is_zero()


def test_character_order_must_divide_group_order(f7):
    with pytest.raises(WrongCongruence):
        character(f7, 5)


def test_character_algebra(f13):
    chi = character(f13, 12, 1)
    assert (chi ** 12).is_trivial()
    assert chi * chi.conj() == character(f13, 12, 0)
    assert chi ** 6 == character(f13, 2, 1)
    assert (chi ** 3).order == 4
    assert chi.at_minus_one() == -1
    assert (chi ** 2).at_minus_one() == 1


def test_gauss_sum_of_trivial_character(f7):
    value = gauss_sum(character(f7, 6, 0))
    assert abs(value.embed() - (-1)) < 1e-9


@pytest.mark.parametrize("a", range(1, 12))
def test_gauss_sum_absolute_value(f13, a):
    value = gauss_sum(character(f13, 12, a))
    assert abs(abs(value.embed()) ** 2 - 13) < 1e-8


def test_gauss_sum_numeric_matches_exact(f13):
    chi = character(f13, 12, 5)
    assert abs(gauss_sum_numeric(chi) - gauss_sum(chi).embed()) < 1e-9


def test_gauss_sum_numeric_over_extension(f49):
    chi = character(f49, 8, 1)
    assert abs(abs(gauss_sum_numeric(chi)) ** 2 - 49) < 1e-8
    with pytest.raises(ExtensionFieldExactUnsupported):
        gauss_sum(chi)


def test_jacobi_sum_of_trivial_characters(f7):
    eps = character(f7, 6, 0)
    assert jacobi_sum(eps, eps) == 5


@pytest.mark.parametrize("a", range(1, 12))
def test_jacobi_sum_with_inverse_character(f13, a):
    chi = character(f13, 12, a)
    assert jacobi_sum(chi, chi.conj()) == -chi.at_minus_one()


@pytest.mark.parametrize("a, b", [(1, 2), (1, 5), (3, 4), (2, 7), (5, 5)])
def test_jacobi_sum_absolute_value(f13, a, b):
    value = jacobi_sum(character(f13, 12, a), character(f13, 12, b))
    assert abs(abs(value.embed()) ** 2 - 13) < 1e-8


def test_jacobi_sum_relates_to_gauss_sums(f13):
    chi1, chi2 = character(f13, 12, 1), character(f13, 12, 4)
    lhs = jacobi_sum(chi1, chi2).embed() * gauss_sum(chi1 * chi2).embed()
    rhs = gauss_sum(chi1).embed() * gauss_sum(chi2).embed()
    assert abs(lhs - rhs) < 1e-8


def test_jacobi_table_matches_direct_sums(f13):
    table = jacobi_table(f13)
    assert table.shape == (12, 12, 4)
    for a, b in [(0, 0), (1, 6), (5, 7), (11, 3)]:
        direct = jacobi_sum(character(f13, 12, a), character(f13, 12, b))
        assert CycNumber(12, table[a, b]) == direct


@pytest.mark.parametrize("p, M", [(7, 6), (13, 12), (13, 4), (11, 10)])
def test_hasse_davenport(p, M):
    for ell in (d for d in range(1, M + 1) if M % d == 0):
        for a in range(M):
            holds, witness = hasse_davenport_check(p, M, ell, a)
            assert holds, witness


def test_hasse_davenport_preconditions():
    with pytest.raises(InvalidParameter):
        hasse_davenport_check(7, 3, 1, 1)
    with pytest.raises(WrongCongruence):
        hasse_davenport_check(11, 4, 2, 1)
    with pytest.raises(InvalidParameter):
        hasse_davenport_check(7, 6, 4, 1)


@pytest.mark.parametrize("p, exponent", [(11, 8), (31, 2), (41, 8)])
def test_jacobi_quotient_is_a_character_value(p, exponent):
    eta = character(build_field(p), 10, 1)
    quotient, _ = divide_exact(jacobi_sum(eta, eta ** 6), jacobi_sum(eta ** 2, eta ** 5))
    assert quotient == (eta ** 8)(2)
    assert root_exponent(quotient, 10) == exponent


def test_divide_exact():
    six, four = CycNumber.from_int(6, 6), CycNumber.from_int(4, 6)
    quotient, coeffs = divide_exact(six, four)
    assert quotient is None
    assert coeffs == [Rational(3, 2), 0]
    zeta = CycNumber.root_of_unity(6, 1)
    quotient, _ = divide_exact(zeta * 3 + 1, zeta * 3 + 1)
    assert quotient == 1
    with pytest.raises(NonUnitQuotient):
        divide_exact(six, CycNumber.zero(6))


def test_character_quotient_test_accepts_character_like_quotient():
    verdict = character_quotient_test(6, 4, 5, 1, 7)
    assert verdict.character_like
    assert verdict.exponent is not None
    assert sorted(verdict.quotients) == [1, 5]
    assert verdict.to_dict()["verdict"] == "CharacterLike"


def test_character_quotient_test_preconditions():
    with pytest.raises(InvalidParameter):
        character_quotient_test(5, 1, 2, 3, 11)
    with pytest.raises(WrongCongruence):
        character_quotient_test(6, 4, 5, 1, 11)
    with pytest.raises(InvalidParameter):
        character_quotient_test(6, 6, 5, 1, 7)
