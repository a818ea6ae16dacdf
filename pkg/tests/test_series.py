import math
import random
from fractions import Fraction as F

import pytest

from diolab.series import NonnegSeries, log_bound_check, ratio_series_check


def test_validation():
    with pytest.raises(ValueError):
        NonnegSeries([])
    with pytest.raises(ValueError):
        NonnegSeries([F(0), F(1)])
    with pytest.raises(ValueError):
        NonnegSeries([F(1), F(-1)])
    with pytest.raises(ValueError):
        ratio_series_check(NonnegSeries([F(1)]), F(0), 1)


def test_ratio_check_harmonic_style():
    # a_n = 1, xi = 1: B_100 = sum 1/n^2 < 2
    res = ratio_series_check(NonnegSeries([F(1)] * 100), F(1), 100)
    assert res.passed
    assert res.partial_sum == pytest.approx(sum(1 / n**2 for n in range(1, 101)))
    assert res.bound == pytest.approx(2.0)


def test_ratio_check_single_term_equality_region():
    res = ratio_series_check(NonnegSeries([F(3, 7)]), F(2, 3), 1)
    assert res.passed
    assert res.partial_sum <= res.bound


def test_ratio_check_geometric():
    res = ratio_series_check(NonnegSeries([F(2) ** n for n in range(1, 51)]), F(1, 2), 50)
    assert res.passed


def test_log_check_harmonic():
    res = log_bound_check(NonnegSeries([F(1)] * 10), 10)
    assert res.passed
    assert res.partial_sum == pytest.approx(2.928968253968254)
    assert res.bound == pytest.approx(1 + math.log(10))


def test_log_check_exact_equality_at_one_term():
    res = log_bound_check(NonnegSeries([F(5, 9)]), 1)
    assert res.partial_sum == 1.0
    assert res.passed  # equality survives the float bound via the slack


def test_prefix_sums_monotone():
    series = NonnegSeries([F(5), F(0), F(2), F(1, 3)])
    sums = series.prefix_sums(4)
    assert sums == [F(5), F(5), F(7), F(22, 3)]
    b_prev = 0.0
    for n in range(1, 5):
        b = log_bound_check(series, n).partial_sum
        assert b >= b_prev
        b_prev = b


def _random_series(rng, max_len=40, max_num=60, max_den=40):
    n = rng.randrange(1, max_len)
    terms = [F(rng.randrange(1, max_num), rng.randrange(1, max_den))]
    terms += [F(rng.randrange(0, max_num), rng.randrange(1, max_den)) for _ in range(n - 1)]
    return NonnegSeries(terms)


def test_fuzz_both_lemmas():
    # the bounds are theorems: any failure is an implementation bug
    rng = random.Random(987)
    for _ in range(1000):
        series = _random_series(rng)
        n = len(series.terms)
        xi = F(rng.randrange(1, 12), rng.randrange(1, 12))
        assert ratio_series_check(series, xi, n).passed
        assert log_bound_check(series, n).passed


def test_fuzz_pipeline_psi_terms():
    # feeding counting weights through the log oracle, as the correlation
    # estimates do
    from diolab.core import ApproxFunction
    from diolab.counting import CountingInstance
    from diolab.sequences import gen_poly_growth_prime, PolyGrowthParams

    seq = gen_poly_growth_prime(PolyGrowthParams(rho1=3, rho2=19, c=2, n1=5), 60)
    inst = CountingInstance(seq, ApproxFunction.constant(F(1, 5)), F(0), 60)
    series = NonnegSeries(inst.psi_values)
    assert log_bound_check(series, 60).passed
    assert ratio_series_check(series, F(1, 2), 60).passed
