from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diolab.core import (ApproxFunction, DyadicPoint, dyadic_power_floor, eval_psi,
                         hits_target, membership, mix_seed, nearest_int_distance,
                         nth_root_floor, rational_from_str, rational_power_floor,
                         rational_to_str)

fractions_st = st.fractions(min_value=-100, max_value=100, max_denominator=10**6)


def test_nearest_int_distance_examples():
    assert nearest_int_distance(F(0)) == 0
    assert nearest_int_distance(F(3, 4)) == F(1, 4)
    # min(|37/5 - 7|, |37/5 - 8|) = min(2/5, 3/5)
    assert nearest_int_distance(F(37, 5)) == F(2, 5)
    assert nearest_int_distance(F(1, 2)) == F(1, 2)


@settings(max_examples=300, deadline=None)
@given(fractions_st, st.integers(min_value=-50, max_value=50))
def test_nearest_int_distance_periodic(x, k):
    assert nearest_int_distance(x) == nearest_int_distance(x + k)


@settings(max_examples=300, deadline=None)
@given(fractions_st)
def test_nearest_int_distance_symmetric(x):
    d = nearest_int_distance(x)
    assert d == nearest_int_distance(-x)
    assert 0 <= d <= F(1, 2)


def test_rational_strings():
    assert rational_to_str(F(3, 7)) == "3/7"
    assert rational_to_str(F(4)) == "4"
    assert rational_from_str("22/7") == F(22, 7)
    assert rational_from_str("5") == F(5)


def test_nth_root_floor():
    assert nth_root_floor(0, 3) == 0
    assert nth_root_floor(26, 3) == 2
    assert nth_root_floor(27, 3) == 3
    assert nth_root_floor(10**60 - 1, 4) == nth_root_floor(10**60, 4) + (-1 if (10**15)**4 == 10**60 else 0)
    big = 7**41
    assert nth_root_floor(big, 41) == 7
    assert nth_root_floor(big - 1, 41) == 6


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**24), st.integers(min_value=1, max_value=12))
def test_nth_root_floor_definition(x, n):
    r = nth_root_floor(x, n)
    assert r**n <= x and (r + 1) ** n > x


def test_rational_power_floor():
    assert rational_power_floor(4, F(19)) == 4**19
    assert rational_power_floor(4, F(3, 2)) == 8
    assert rational_power_floor(5, F(3, 2)) == 11  # floor(11.18...)
    assert rational_power_floor(10, F(1, 2)) == 3


def test_dyadic_power_floor_is_lower_bound():
    v = dyadic_power_floor(7, 1, F(1, 2), bits=64)
    m = v * (1 << 64)
    assert m.denominator == 1
    m = m.numerator
    # m = floor(2**64 * 7**-0.5): squares straddle 2**128 / 7
    assert m * m * 7 <= 1 << 128 < (m + 1) * (m + 1) * 7


def test_dyadic_point_basics():
    x = DyadicPoint.from_fraction(F(1, 3), 8)
    assert x.numerator == 85  # floor(256/3)
    assert x.value == F(85, 256)
    assert DyadicPoint.from_hex(x.to_hex()) == x
    with pytest.raises(ValueError):
        DyadicPoint(-1, 8)
    with pytest.raises(ValueError):
        DyadicPoint(256, 8)


def test_psi_families():
    power = ApproxFunction.power(1, 1)
    assert power(4) == F(1, 4)
    assert power(2) == F(1, 2)
    assert power(1) == F(1, 2)  # clamped
    const = ApproxFunction.constant(F(1, 10))
    assert const(999) == F(1, 10)
    indexed = ApproxFunction.indexed([F(1, 2), F(1, 3)])
    assert indexed(17, n=2) == F(1, 3)
    with pytest.raises(IndexError):
        indexed(17, n=3)
    with pytest.raises(IndexError):
        indexed(17)
    cb = ApproxFunction.from_callback(lambda q, n: F(2, q))
    assert cb(8) == F(1, 4)
    assert cb(1) == F(1)  # clamped into [0, 1]


def test_psi_power_fractional_exponent_deterministic():
    psi = ApproxFunction.power(1, F(1, 2))
    v1, v2 = psi(7), psi(7)
    assert v1 == v2
    assert 0 < v1 < F(1, 2)
    # dyadic floor never exceeds the true value: v**2 <= 1/7
    assert v1 * v1 <= F(1, 7)


def test_psi_logpow():
    psi = ApproxFunction.logpow(1, 2)
    v = psi(100)
    assert 0 < v < F(1, 2)
    assert abs(float(v) - 1 / __import__("math").log(102) ** 2) < 1e-12


def test_psi_json_roundtrip():
    for psi in (ApproxFunction.power(F(1, 2), 2), ApproxFunction.constant(F(3, 10)),
                ApproxFunction.logpow(1, F(3, 2)), ApproxFunction.indexed([F(1, 2), F(1, 5)])):
        back = ApproxFunction.from_json(psi.to_json())
        for q, n in ((1, 1), (5, 2), (100, 1)):
            assert back.eval(q, n) == psi.eval(q, n)
    with pytest.raises(ValueError):
        ApproxFunction.from_callback(lambda q, n: F(0)).to_json()


def test_membership_examples():
    const = ApproxFunction.constant(F(1, 10))
    zero = DyadicPoint.from_fraction(F(0))
    assert membership(zero, 12345, F(0), const)
    x = DyadicPoint.from_fraction(F(33, 100))
    assert membership(x, 3, F(0), const)
    assert not membership(x, 2, F(0), const)


def test_membership_huge_q_exact():
    # q far beyond float range still decides exactly
    q = 10**50 + 151
    x = DyadicPoint.from_fraction(F(1, q))
    assert membership(x, q, F(0), ApproxFunction.constant(F(1, 1000)))


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=(1 << 64) - 1),
       st.integers(min_value=1, max_value=10**6),
       st.fractions(min_value=0, max_value=1, max_denominator=97),
       st.fractions(min_value=0, max_value=F(1, 2), max_denominator=89),
       st.fractions(min_value=0, max_value=F(1, 2), max_denominator=83))
def test_membership_monotone_in_psi(x_num, q, gamma, p_small, p_extra):
    x = DyadicPoint(x_num, 64)
    psi1 = ApproxFunction.constant(p_small)
    psi2 = ApproxFunction.constant(min(F(1), p_small + p_extra))
    if membership(x, q, gamma, psi1):
        assert membership(x, q, gamma, psi2)


def test_hits_target_matches_membership():
    x = DyadicPoint.from_fraction(F(5, 17))
    gamma, p = F(2, 7), F(1, 12)
    got = hits_target(x.numerator, x.precision_bits, 11,
                      gamma.numerator, gamma.denominator, p.numerator, p.denominator)
    want = nearest_int_distance(11 * x.value - gamma) <= p
    assert got == want


def test_eval_psi_alias():
    psi = ApproxFunction.power(1, 1)
    assert eval_psi(psi, 8) == F(1, 8)


def test_mix_seed_stable():
    assert mix_seed(1, 2) == mix_seed(1, 2)
    assert mix_seed(1, 2) != mix_seed(2, 1)
    assert 0 <= mix_seed(0) < 1 << 64
