import random
from fractions import Fraction as F

import pytest

from diolab.core import ApproxFunction, ClassificationError, DyadicPoint
from diolab.counting import (CountingInstance, arc_intersection_measure, arc_intervals,
                             arc_union_measure, count_hits, gcd_error_prefixes,
                             gcd_error_sum, khintchine_verdict, psi_sum,
                             schmidt_experiment)
from diolab.measures import MeasureSpec
from diolab.sequences import DenominatorSequence, GrowthModel, gen_geometric

CONST_TENTH = ApproxFunction.constant(F(1, 10))
CONST_FIFTH = ApproxFunction.constant(F(1, 5))


def _inst(terms, psi=CONST_TENTH, gamma=F(0)):
    seq = DenominatorSequence.from_terms(terms)
    return CountingInstance(seq, psi, gamma, len(terms))


def test_count_hits_examples():
    inst = _inst([2, 3, 5])
    x = DyadicPoint.from_fraction(F(33, 100))
    assert count_hits(x, inst) == 1  # only q = 3 hits
    zero = DyadicPoint.from_fraction(F(0))
    assert count_hits(zero, inst) == 3  # ||0|| = 0 <= psi for every q


def test_count_hits_monotone_in_psi_and_n():
    rng = random.Random(4)
    terms = sorted(rng.sample(range(2, 10**6), 30))
    small = _inst(terms, ApproxFunction.constant(F(3, 100)))
    large = _inst(terms, ApproxFunction.constant(F(9, 100)))
    for _ in range(50):
        x = DyadicPoint(rng.getrandbits(128))
        r_small = count_hits(x, small)
        assert r_small <= count_hits(x, large)  # monotone in psi
        assert 0 <= r_small <= 30
        prev = 0
        for n in (1, 10, 20, 30):
            cur = count_hits(x, small, upto=n)
            assert cur >= prev and cur <= n
            prev = cur


def test_psi_sum_examples():
    assert psi_sum(_inst(list(range(2, 52)))) == 5  # 50 * 1/10
    seq = DenominatorSequence.from_terms([3, 7, 11])
    indexed = CountingInstance(seq, ApproxFunction.indexed([F(1, 2), F(1, 3), F(1, 6)]), F(0), 3)
    assert psi_sum(indexed) == 1
    power = CountingInstance(gen_geometric(2, 3), ApproxFunction.power(1, 1), F(0), 3)
    assert psi_sum(power) == F(7, 8)


def test_gcd_error_hand_values():
    assert gcd_error_sum(_inst([2, 4]), exact=True).value == F(1, 20)
    assert gcd_error_sum(_inst([2, 3]), exact=True).value == F(1, 30)
    single = CountingInstance(DenominatorSequence.from_terms([5]), CONST_TENTH, F(0), 1)
    assert gcd_error_sum(single, exact=True).value == 0
    assert gcd_error_sum(single).value == 0.0


def test_gcd_error_float_matches_exact():
    rng = random.Random(11)
    terms = sorted(rng.sample(range(2, 10**5), 120))
    inst = _inst(terms, ApproxFunction.power(1, 1))
    exact = gcd_error_sum(inst, exact=True)
    approx = gcd_error_sum(inst)
    assert approx.mode == "float" and exact.mode == "exact"
    assert abs(float(exact.value) - approx.value) <= max(1e-12, approx.error_bound)


def test_gcd_error_coprime_cross_check():
    # pairwise coprime: gcd factor 1, sum of min weights only
    terms = [2, 3, 5, 7, 11, 13]
    inst = _inst(terms, CONST_TENTH)
    expect = sum(min(F(1, 10) / terms[m], F(1, 10) / terms[n])
                 for m in range(6) for n in range(m + 1, 6))
    assert gcd_error_sum(inst, exact=True).value == expect


def test_gcd_error_prefixes_match_direct():
    rng = random.Random(5)
    terms = sorted(rng.sample(range(2, 10**5), 80))
    inst = _inst(terms, CONST_FIFTH)
    pres = gcd_error_prefixes(inst, [10, 40, 80])
    for cp in (10, 40, 80):
        sub = CountingInstance(DenominatorSequence.from_terms(terms[:cp]), CONST_FIFTH, F(0), cp)
        assert pres[cp] == pytest.approx(gcd_error_sum(sub).value, rel=1e-12)


def test_exact_mode_cap():
    terms = list(range(2, 2203))
    inst = _inst(terms)
    with pytest.raises(ValueError):
        gcd_error_sum(inst, exact=True)


def test_arc_union_measure():
    assert arc_union_measure(7, F(0), F(1, 10)) == F(1, 5)
    assert arc_union_measure(7, F(2, 3), F(1, 10)) == F(1, 5)  # shift invariant
    assert arc_union_measure(5, F(1, 7), F(1, 2)) == 1
    assert arc_union_measure(5, F(0), F(0)) == 0
    assert arc_union_measure(1, F(1, 2), F(3, 4)) == 1  # q = 1, saturated
    rng = random.Random(2)
    for _ in range(60):
        q = rng.randrange(1, 400)
        psi = F(rng.randrange(1, 50), 101)
        gamma = F(rng.randrange(0, 13), 13)
        assert arc_union_measure(q, gamma, psi) == 2 * psi


def test_arc_intervals_are_disjoint_sorted():
    ints = arc_intervals(6, F(1, 5), F(2, 5))
    assert all(lo < hi for lo, hi in ints)
    assert all(a[1] <= b[0] for a, b in zip(ints, ints[1:]))
    assert sum(hi - lo for lo, hi in ints) == F(4, 5)


def test_arc_intersection_hand_value():
    rep = arc_intersection_measure(2, 3, F(0), F(1, 10))
    assert rep.measure == F(1, 15)
    assert rep.expected == F(1, 25)
    assert rep.residual == F(2, 75)
    assert rep.normalizer == F(1, 30)
    assert rep.normalized == F(4, 5)


def test_arc_intersection_edges():
    assert arc_intersection_measure(2, 4, F(0), F(0)).measure == 0
    full = arc_intersection_measure(2, 4, F(0), F(1, 2))
    assert full.measure == 1 and full.residual == 0
    with pytest.raises(ValueError):
        arc_intersection_measure(3, 3, F(0), F(1, 10))


def test_schmidt_lebesgue_mean_matches_expectation():
    inst = CountingInstance(gen_geometric(2, 20), CONST_FIFTH, F(0), 20)
    rep = schmidt_experiment(inst, MeasureSpec.lebesgue(), 10**4, seed=314)
    assert rep.expected_mean == pytest.approx(2 * float(psi_sum(inst)))
    assert rep.mean_within(3.0)
    assert 0 <= rep.in_band_fraction <= 1
    assert rep.ratio_quantiles["min"] <= rep.ratio_quantiles["median"] <= rep.ratio_quantiles["max"]


def test_schmidt_degenerate_sampler():
    inst = CountingInstance(gen_geometric(2, 10), CONST_FIFTH, F(0), 10)
    rep = schmidt_experiment(inst, MeasureSpec.point_masses([(F(0), 1)]), 7, seed=1)
    expect_ratio = 10 / (2 * float(psi_sum(inst)))
    assert all(row.hits == 10 for row in rep.rows)
    assert all(row.ratio == pytest.approx(expect_ratio) for row in rep.rows)


def test_schmidt_threads_do_not_change_results():
    inst = CountingInstance(gen_geometric(3, 15), CONST_FIFTH, F(1, 4), 15)
    a = schmidt_experiment(inst, MeasureSpec.lebesgue(), 40, seed=9, threads=1)
    b = schmidt_experiment(inst, MeasureSpec.lebesgue(), 40, seed=9, threads=4)
    assert [r.hits for r in a.rows] == [r.hits for r in b.rows]
    assert [r.x.numerator for r in a.rows] == [r.x.numerator for r in b.rows]


def test_schmidt_saturated_psi_warns():
    seq = DenominatorSequence.from_terms([2, 3, 4])
    inst = CountingInstance(seq, ApproxFunction.constant(F(3, 4)), F(0), 3)
    rep = schmidt_experiment(inst, MeasureSpec.lebesgue(), 5, seed=2)
    assert rep.warnings
    assert rep.expected_mean == pytest.approx(3.0)  # every arc union saturates


def test_schmidt_rejects_zero_psi():
    seq = DenominatorSequence.from_terms([2, 3])
    inst = CountingInstance(seq, ApproxFunction.constant(F(0)), F(0), 2)
    with pytest.raises(ValueError):
        schmidt_experiment(inst, MeasureSpec.lebesgue(), 5, seed=3)


def test_schmidt_median_ratio_near_one_across_horizons():
    # in the low-correlation regime (E much smaller than Psi**2) the median
    # of R/(2 Psi) sits close to 1 and stays there as the horizon grows
    from diolab.sequences import PolyGrowthParams, gen_poly_growth_prime
    seq = gen_poly_growth_prime(PolyGrowthParams(rho1=3, rho2=19, c=2, n1=5), 4000)
    medians = {}
    for horizon in (250, 1000, 4000):
        inst = CountingInstance(seq, CONST_FIFTH, F(0), horizon)
        rep = schmidt_experiment(inst, MeasureSpec.lebesgue(), 60, seed=777)
        medians[horizon] = rep.ratio_quantiles["median"]
    assert all(abs(m - 1.0) <= 0.05 for m in medians.values())
    assert abs(medians[4000] - 1.0) <= 0.01


def test_khintchine_verdicts():
    geo = GrowthModel("geometric", 2)
    poly3 = GrowthModel("polynomial", 3)
    assert khintchine_verdict(ApproxFunction.power(1, 1), geo).converges
    assert not khintchine_verdict(ApproxFunction.constant(F(1, 100)), geo).converges
    assert khintchine_verdict(ApproxFunction.constant(F(0)), geo).converges
    # lam * g > 1 converges, <= 1 diverges
    assert khintchine_verdict(ApproxFunction.power(1, F(1, 2)), poly3).converges
    assert not khintchine_verdict(ApproxFunction.power(1, F(1, 3)), poly3).converges
    assert not khintchine_verdict(ApproxFunction.power(1, F(1, 4)), poly3).converges
    assert khintchine_verdict(ApproxFunction.logpow(1, 2), geo).converges
    assert not khintchine_verdict(ApproxFunction.logpow(1, 1), geo).converges
    assert not khintchine_verdict(ApproxFunction.logpow(1, 5), poly3).converges
    smooth2 = GrowthModel("exp_power", 2)
    assert khintchine_verdict(ApproxFunction.power(1, F(1, 10)), smooth2).converges
    assert khintchine_verdict(ApproxFunction.logpow(1, 3), smooth2).converges
    assert not khintchine_verdict(ApproxFunction.logpow(1, 2), smooth2).converges
    with pytest.raises(ClassificationError):
        khintchine_verdict(ApproxFunction.indexed([F(1, 2)]), geo)
