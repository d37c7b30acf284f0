import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.services.errors import BadReduction, FieldTooLarge, NotPrime, ZeroElement
from app.services.ffield import build_field, dlog, nth_power_count, nth_power_counts


@pytest.mark.parametrize("p, generator", [(7, 3), (11, 2), (13, 2), (31, 3), (41, 6)])
def test_prime_field_generator_is_smallest_primitive_root(p, generator):
    assert build_field(p).generator == generator


def test_quadratic_extension_of_f7(f49):
    assert f49.q == 49
    assert f49.modulus == (1, 0, 1)
    assert f49.generator == 9


def test_log_and_exp_tables_are_inverse(f49):
    nonzero = np.arange(1, f49.q)
    assert np.array_equal(f49.exp_table[f49.log_table[nonzero]], nonzero)
    assert f49.log_table[0] == -1


@given(a=st.integers(1, 48), b=st.integers(0, 48), c=st.integers(0, 48))
def test_field_axioms_in_f49(a, b, c):
    f = build_field(7, 2)
    assert int(f.mul(a, f.inv(a))) == 1
    assert int(f.mul(a, b)) == int(f.mul(b, a))
    assert int(f.mul(a, f.add(b, c))) == int(f.add(f.mul(a, b), f.mul(a, c)))
    assert int(f.add(b, f.neg(b))) == 0


def test_frobenius_fixes_exactly_the_prime_subfield(f49):
    xs = f49.elements()
    fixed = xs[f49.frobenius(xs) == xs]
    assert list(fixed) == list(range(7))


def test_trace_lands_in_prime_field(f49):
    traces = f49.trace(f49.elements())
    assert traces.min() >= 0 and traces.max() < 7
    # Each value of the trace has exactly q/p preimages
    assert np.array_equal(np.bincount(traces, minlength=7), np.full(7, 7))


def test_from_rational(f7):
    assert f7.from_rational(1, 2) == 4
    assert f7.from_rational(-3, 5) == (-3 * 3) % 7
    with pytest.raises(BadReduction):
        f7.from_rational(1, 14)


def test_dlog(f7):
    assert dlog(3, f7) == 1
    assert dlog(1, f7) == 0
    assert dlog(2, f7) == 2
    with pytest.raises(ZeroElement):
        dlog(0, f7)


def test_nth_power_counts(f7):
    assert nth_power_count(0, 2, f7) == 1
    assert nth_power_count(2, 2, f7) == 2
    assert nth_power_count(3, 2, f7) == 0
    assert nth_power_count(1, 3, f7) == 3
    # x -> x^5 is a bijection of F_7
    assert list(nth_power_counts(np.arange(7), 5, f7)) == [1] * 7


def test_counts_sum_to_field_size(f13):
    for n in (2, 3, 4, 6, 12):
        assert nth_power_counts(f13.elements(), n, f13).sum() == f13.q


@pytest.mark.parametrize("p, s", [(9, 1), (3, 1), (1, 1), (7, 0)])
def test_not_prime(p, s):
    with pytest.raises(NotPrime):
        build_field(p, s)


def test_field_too_large():
    with pytest.raises(FieldTooLarge):
        build_field(7, 9)


def test_inverse_of_zero(f7):
    with pytest.raises(ZeroElement):
        f7.inv(0)
