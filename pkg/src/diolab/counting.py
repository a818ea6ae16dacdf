"""Hit counting, gcd correlation sums, exact arc measures, and the seeded
counting experiment.

For a denominator prefix q_1 < ... < q_N, shift gamma and approximation
function psi, the counting function R(x, N) is the number of indices n with
||q_n x - gamma|| <= psi(q_n).  Its Lebesgue expectation is the sum of the
arc-union measures, exactly 2 * sum psi(q_n) while every psi(q_n) < 1/2.
The pairwise gcd sum

    E(N) = sum_{m<n} gcd(q_m, q_n) * min(psi(q_m)/q_m, psi(q_n)/q_n)

controls the correlations between hits and scales the deviation
normalization of the experiment.

Everything that feeds a verdict is exact: membership clears denominators,
measures come from a rational interval sweep, and the float mode of the gcd
sum carries a compensated-summation error bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (ApproxFunction, ClassificationError, DyadicPoint,
                   check_unit_interval, rational_to_str)
from .measures import MeasureSpec, sample as draw_samples
from .sequences import DenominatorSequence, GrowthModel

EXACT_GCD_SUM_CAP = 2000


class CountingInstance:
    """A counting problem: sequence prefix, psi, shift, horizon."""

    def __init__(self, seq: DenominatorSequence, psi: ApproxFunction,
                 gamma: Fraction, horizon: int):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.seq = seq
        self.psi = psi
        self.gamma = check_unit_interval(gamma)
        self.horizon = horizon
        self.terms = seq.prefix(horizon)
        if len(self.terms) < horizon:
            raise ValueError(f"sequence has only {len(self.terms)} terms, need {horizon}")
        # eager evaluation so bad psi configurations fail at construction
        self.psi_values: List[Fraction] = [psi.eval(q, n)
                                           for n, q in enumerate(self.terms, start=1)]

    @cached_property
    def psi_pairs(self) -> List[Tuple[int, int]]:
        return [(v.numerator, v.denominator) for v in self.psi_values]


def _count_hits_raw(x_num: int, bits: int, terms: Sequence[int],
                    psi_pairs: Sequence[Tuple[int, int]], g_num: int, g_den: int) -> int:
    big_den = g_den << bits
    g_scaled = g_num << bits
    base = x_num * g_den
    count = 0
    for q, (p_num, p_den) in zip(terms, psi_pairs):
        u = (q * base - g_scaled) % big_den
        dist = big_den - u if u + u > big_den else u
        if p_den * dist <= p_num * big_den:
            count += 1
    return count


def count_hits(x: DyadicPoint, inst: CountingInstance, upto: Optional[int] = None) -> int:
    """R(x, N): exact hit count over n = 1..N."""
    n = inst.horizon if upto is None else upto
    if not 0 <= n <= inst.horizon:
        raise ValueError("upto out of range")
    return _count_hits_raw(x.numerator, x.precision_bits, inst.terms[:n],
                           inst.psi_pairs[:n], inst.gamma.numerator, inst.gamma.denominator)


def psi_sum(inst: CountingInstance, upto: Optional[int] = None) -> Fraction:
    """Exact sum of psi(q_n) over n = 1..N."""
    n = inst.horizon if upto is None else upto
    return sum(inst.psi_values[:n], Fraction(0))


@dataclass
class GcdErrorResult:
    value: Union[Fraction, float]
    mode: str                      # "exact" | "float"
    error_bound: Optional[float]   # None in exact mode


def gcd_error_sum(inst: CountingInstance, exact: bool = False) -> GcdErrorResult:
    """E(N), the pairwise gcd-weighted min sum.

    Float mode (default) uses Neumaier-compensated summation and reports a
    rounding bound; exact mode accumulates rationals and is capped at
    N <= 2000 because the common denominators grow without bound.
    """
    if inst.horizon < 2:
        return GcdErrorResult(Fraction(0) if exact else 0.0, "exact" if exact else "float",
                              None if exact else 0.0)
    if exact:
        if inst.horizon > EXACT_GCD_SUM_CAP:
            raise ValueError(f"exact mode capped at N <= {EXACT_GCD_SUM_CAP}")
        terms = inst.terms
        weights = [p / q for p, q in zip(inst.psi_values, terms)]
        total = Fraction(0)
        for n in range(1, inst.horizon):
            q_n, w_n = terms[n], weights[n]
            acc_num = Fraction(0)
            for m in range(n):
                w = w_n if w_n <= weights[m] else weights[m]
                acc_num += math.gcd(terms[m], q_n) * w
            total += acc_num
        return GcdErrorResult(total, "exact", None)
    total, comp, abs_total = _gcd_error_float(inst.terms, inst.psi_values, 0, inst.horizon)
    bound = abs_total * len(inst.terms) ** 2 * 2.0 ** -52
    return GcdErrorResult(total + comp, "float", bound)


def _gcd_error_float(terms: Sequence[int], psi_values: Sequence[Fraction],
                     start_n: int, stop_n: int) -> Tuple[float, float, float]:
    """Neumaier sum of pair terms for n in [start_n, stop_n); full m < n loop."""
    weights = [float(p) / float(q) if q.bit_length() < 970 else float(p / q)
               for p, q in zip(psi_values, terms)]
    total = comp = abs_total = 0.0
    for n in range(max(start_n, 1), stop_n):
        q_n, w_n = terms[n], weights[n]
        for m in range(n):
            w = w_n if w_n <= weights[m] else weights[m]
            term = math.gcd(terms[m], q_n) * w
            s = total + term
            if abs(total) >= abs(term):
                comp += (total - s) + term
            else:
                comp += (term - s) + total
            total = s
            abs_total += term
    return total, comp, abs_total


def gcd_error_prefixes(inst: CountingInstance, checkpoints: Sequence[int]) -> Dict[int, float]:
    """E(N) at several horizons N in one incremental pass (float mode)."""
    cps = sorted(set(checkpoints))
    if cps and (cps[0] < 1 or cps[-1] > inst.horizon):
        raise ValueError("checkpoints out of range")
    out: Dict[int, float] = {}
    total = comp = 0.0
    prev = 0
    for cp in cps:
        t, c, _ = _gcd_error_float(inst.terms[:cp], inst.psi_values[:cp], prev, cp)
        total += t
        comp += c
        out[cp] = total + comp
        prev = cp
    return out


# ---------------------------------------------------------------------------
# Exact Lebesgue measures of the hit sets via rational interval sweeps
# ---------------------------------------------------------------------------

def arc_intervals(q: int, gamma: Fraction, psi_q: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """The hit set {x : ||q x - gamma|| <= psi_q} as sorted disjoint
    subintervals of [0, 1): q arcs of half-width psi_q / q centered at
    (p + gamma)/q, wrapped and merged."""
    if q < 1:
        raise ValueError("q must be >= 1")
    gamma = check_unit_interval(gamma)
    psi_q = Fraction(psi_q)
    if psi_q == 0:
        return []
    delta = psi_q / q
    if 2 * delta >= 1:
        return [(Fraction(0), Fraction(1))]
    raw = []
    for p in range(q):
        lo = ((Fraction(p) + gamma) / q - delta) % 1
        hi = lo + 2 * delta
        if hi <= 1:
            raw.append((lo, hi))
        else:
            raw.append((lo, Fraction(1)))
            raw.append((Fraction(0), hi - 1))
    raw.sort()
    merged = [raw[0]]
    for lo, hi in raw[1:]:
        if lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def _intervals_measure(intervals: Sequence[Tuple[Fraction, Fraction]]) -> Fraction:
    return sum((hi - lo for lo, hi in intervals), Fraction(0))


def arc_union_measure(q: int, gamma: Fraction, psi_q: Fraction) -> Fraction:
    """Exact Lebesgue measure of the hit set; equals 2 * psi_q whenever
    psi_q < 1/2 (disjoint arcs), saturating at 1."""
    return _intervals_measure(arc_intervals(q, gamma, psi_q))


@dataclass
class IntersectionReport:
    measure: Fraction
    expected: Fraction             # 4 * psi(q) * psi(q')
    residual: Fraction             # |measure - expected|
    normalizer: Fraction           # gcd(q,q') * min(psi/q, psi'/q')
    normalized: Optional[Fraction]  # residual / normalizer, None if 0/0


def arc_intersection_measure(q: int, q2: int, gamma: Fraction,
                             psi_q: Fraction, psi_q2: Optional[Fraction] = None) -> IntersectionReport:
    """Exact measure of the intersection of two hit sets, with the residual
    against the product heuristic 4 psi psi' and its gcd-normalized size."""
    if q == q2:
        raise ValueError("need two distinct denominators")
    psi_q = Fraction(psi_q)
    psi_q2 = psi_q if psi_q2 is None else Fraction(psi_q2)
    a = arc_intervals(q, gamma, psi_q)
    b = arc_intervals(q2, gamma, psi_q2)
    total = Fraction(0)
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            total += hi - lo
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    expected = 4 * psi_q * psi_q2
    residual = abs(total - expected)
    normalizer = math.gcd(q, q2) * min(psi_q / q, psi_q2 / q2)
    normalized = residual / normalizer if normalizer else (Fraction(0) if residual == 0 else None)
    return IntersectionReport(measure=total, expected=expected, residual=residual,
                              normalizer=normalizer, normalized=normalized)


# ---------------------------------------------------------------------------
# The counting experiment
# ---------------------------------------------------------------------------

@dataclass
class SampleRow:
    index: int
    x: DyadicPoint
    hits: int
    ratio: float
    normalized_deviation: float


@dataclass
class SchmidtReport:
    """Per-sample counting statistics against the 2*Psi(N) reference."""

    rows: List[SampleRow]
    horizon: int
    psi_total: Fraction
    gcd_error: float
    expected_mean: float
    epsilon: float
    band_k: float
    band_width: float
    in_band_fraction: float
    mean_hits: float
    stderr_hits: float
    ratio_quantiles: Dict[str, float]
    warnings: List[str] = field(default_factory=list)

    def mean_within(self, n_stderr: float = 3.0) -> bool:
        return abs(self.mean_hits - self.expected_mean) <= n_stderr * self.stderr_hits

    def summary_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "psi_total": rational_to_str(self.psi_total),
            "gcd_error": self.gcd_error,
            "expected_mean": self.expected_mean,
            "epsilon": self.epsilon,
            "band_k": self.band_k,
            "band_width": self.band_width,
            "in_band_fraction": self.in_band_fraction,
            "mean_hits": self.mean_hits,
            "stderr_hits": self.stderr_hits,
            "ratio_quantiles": self.ratio_quantiles,
            "samples": len(self.rows),
            "warnings": self.warnings,
        }


def _hit_counts_chunk(args) -> List[Tuple[int, int]]:
    indices, x_nums, bits, terms, psi_pairs, g_num, g_den = args
    return [(i, _count_hits_raw(x, bits, terms, psi_pairs, g_num, g_den))
            for i, x in zip(indices, x_nums)]


def schmidt_experiment(inst: CountingInstance, sampler: MeasureSpec, n_samples: int,
                       seed: int, epsilon: Fraction = Fraction(1, 10),
                       band_k: float = 5.0, threads: int = 1,
                       bits: int = 128) -> SchmidtReport:
    """Draw n_samples points, count hits for each, and report the counting
    statistics at horizon N:

      ratio                  R / (2 Psi(N))
      normalized deviation   (R - 2 Psi) / ((Psi+E)^(1/2) (log(Psi+E+2))^(2+eps))
      in-band fraction       |ratio - 1| <= band_k * Psi^(-1/2) (log(Psi+2))^(2+eps)

    Deterministic under (seed, config) and independent of `threads`: sample i
    is drawn from substream (seed, i) and reductions are index-ordered.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    psi_total = psi_sum(inst)
    if psi_total <= 0:
        raise ValueError("psi sum over the horizon must be positive")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    warnings = []
    # arc-union measure is min(1, 2 psi): arcs of width 2 psi/q on a 1/q grid
    # are disjoint below psi = 1/2 and tile the circle from there on
    expected_mean = float(sum((min(Fraction(1), 2 * v) for v in inst.psi_values), Fraction(0)))
    if any(v >= Fraction(1, 2) for v in inst.psi_values):
        warnings.append("some psi(q_n) >= 1/2: expectation uses saturated arc measures, "
                        "not 2*Psi(N)")

    points = draw_samples(sampler, n_samples, seed, bits)
    gcd_err = gcd_error_sum(inst).value
    psi_f = float(psi_total)
    eps_f = float(epsilon)
    scale = math.sqrt(psi_f + gcd_err) * math.log(psi_f + gcd_err + 2) ** (2 + eps_f)
    band_width = band_k * psi_f ** -0.5 * math.log(psi_f + 2) ** (2 + eps_f)

    jobs = list(enumerate(p.numerator for p in points))
    if threads > 1 and n_samples > 1:
        n_chunks = min(threads * 4, n_samples)
        chunks = [jobs[c::n_chunks] for c in range(n_chunks)]
        payloads = [([i for i, _ in ch], [x for _, x in ch], bits, inst.terms,
                     inst.psi_pairs, inst.gamma.numerator, inst.gamma.denominator)
                    for ch in chunks if ch]
        results: List[Tuple[int, int]] = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_hit_counts_chunk, payloads):
                results.extend(part)
        results.sort()
    else:
        results = _hit_counts_chunk(([i for i, _ in jobs], [x for _, x in jobs], bits,
                                     inst.terms, inst.psi_pairs,
                                     inst.gamma.numerator, inst.gamma.denominator))

    rows = []
    for (i, r), point in zip(results, points):
        ratio = r / (2 * psi_f)
        dev = (r - 2 * psi_f) / scale
        rows.append(SampleRow(index=i, x=point, hits=r, ratio=ratio,
                              normalized_deviation=dev))

    hits = np.array([row.hits for row in rows], dtype=float)
    ratios = np.array([row.ratio for row in rows])
    in_band = float(np.mean(np.abs(ratios - 1.0) <= band_width))
    quantiles = {"min": float(ratios.min()),
                 "q25": float(np.quantile(ratios, 0.25)),
                 "median": float(np.quantile(ratios, 0.5)),
                 "q75": float(np.quantile(ratios, 0.75)),
                 "max": float(ratios.max())}
    stderr = float(hits.std(ddof=1) / math.sqrt(len(hits))) if len(hits) > 1 else float("inf")

    return SchmidtReport(rows=rows, horizon=inst.horizon, psi_total=psi_total,
                         gcd_error=gcd_err, expected_mean=expected_mean,
                         epsilon=eps_f, band_k=band_k, band_width=band_width,
                         in_band_fraction=in_band, mean_hits=float(hits.mean()),
                         stderr_hits=stderr, ratio_quantiles=quantiles,
                         warnings=warnings)


# ---------------------------------------------------------------------------
# Symbolic convergence classification of sum psi(q_n)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceVerdict:
    converges: bool
    reason: str


def khintchine_verdict(psi: ApproxFunction, growth: GrowthModel) -> ConvergenceVerdict:
    """Classify sum_n psi(q_n) for parametric psi and declared growth.

    Refuses (raises ClassificationError) on families without a known
    closed-form comparison instead of guessing from partial sums.
    """
    if psi.family == "constant":
        c = psi.params["c"]
        if c == 0:
            return ConvergenceVerdict(True, "psi identically zero")
        return ConvergenceVerdict(False, "constant positive terms on an infinite sequence")

    if psi.family == "power":
        c, lam = psi.params["c"], psi.params["lam"]
        if c == 0:
            return ConvergenceVerdict(True, "psi identically zero")
        if lam <= 0:
            return ConvergenceVerdict(False, "terms bounded below by a positive constant")
        if growth.kind == "geometric":
            return ConvergenceVerdict(True, f"geometric decay with ratio {growth.param}**-{lam}")
        if growth.kind == "exp_power":
            return ConvergenceVerdict(True, "stretched-exponential decay of the terms")
        prod = lam * growth.param
        if prod > 1:
            return ConvergenceVerdict(True, f"p-series with exponent lam*g = {prod} > 1")
        return ConvergenceVerdict(False, f"p-series with exponent lam*g = {prod} <= 1")

    if psi.family == "logpow":
        c, beta = psi.params["c"], psi.params["beta"]
        if c == 0:
            return ConvergenceVerdict(True, "psi identically zero")
        if beta <= 0:
            return ConvergenceVerdict(False, "terms do not decay")
        if growth.kind == "geometric":
            if beta > 1:
                return ConvergenceVerdict(True, f"terms ~ n**-{beta}, beta > 1")
            return ConvergenceVerdict(False, f"terms ~ n**-{beta}, beta <= 1")
        if growth.kind == "polynomial":
            return ConvergenceVerdict(False, "log-power decay is too slow on polynomial growth")
        k = growth.param
        if beta > k:
            return ConvergenceVerdict(True, f"terms ~ n**-(beta/k) with beta/k = {beta/k} > 1")
        return ConvergenceVerdict(False, f"terms ~ n**-(beta/k) with beta/k = {beta/k} <= 1")

    raise ClassificationError(f"cannot classify psi family {psi.family!r} symbolically")
