"""Numeric oracles for two partial-sum facts about nonnegative series.

With S_n = a_1 + ... + a_n (a_1 > 0):

  * sum_{n<=N} a_n / S_n**(1+xi) stays below a_1**-xi * (1 + 1/xi) for any
    xi > 0 (the series converges);
  * sum_{n<=N} a_n / S_n stays below 1 + log(S_N) - log(a_1).

Both are theorems, so the checks double as fuzz targets: a failure on any
nonnegative rational series is an implementation bug.  Prefix sums are
accumulated exactly; only the transcendental bound of the log variant is
evaluated in double, with a 1e-9 slack on the bound side so that exact
equality cases (N = 1 gives B_1 = 1 vs bound 1) survive rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import exp, log
from typing import List, Sequence

_SLACK = 1e-9


class NonnegSeries:
    """Nonnegative rational terms with a positive first term."""

    def __init__(self, terms: Sequence[Fraction]):
        self.terms = [Fraction(t) for t in terms]
        if not self.terms:
            raise ValueError("need at least one term")
        if self.terms[0] <= 0:
            raise ValueError("first term must be positive")
        if any(t < 0 for t in self.terms):
            raise ValueError("terms must be nonnegative")

    def prefix_sums(self, n: int) -> List[Fraction]:
        if not 1 <= n <= len(self.terms):
            raise ValueError(f"need 1 <= n <= {len(self.terms)}")
        out, acc = [], Fraction(0)
        for t in self.terms[:n]:
            acc += t
            out.append(acc)
        return out


@dataclass(frozen=True)
class SeriesCheckResult:
    partial_sum: float
    bound: float
    passed: bool


def _log_frac(x: Fraction) -> float:
    # big numerators and denominators stay in range this way
    return log(x.numerator) - log(x.denominator)


def _term_over_power(a: Fraction, s: Fraction, exponent: float) -> float:
    if a == 0:
        return 0.0
    return exp(_log_frac(a) - exponent * _log_frac(s))


def ratio_series_check(series: NonnegSeries, xi: Fraction, n: int) -> SeriesCheckResult:
    """B_N = sum a_n / S_n**(1+xi) against the closed bound a_1**-xi (1 + 1/xi)."""
    xi = Fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    sums = series.prefix_sums(n)
    exponent = float(1 + xi)
    b_n = sum(_term_over_power(a, s, exponent)
              for a, s in zip(series.terms[:n], sums))
    bound = exp(-float(xi) * _log_frac(series.terms[0])) * (1 + 1 / float(xi))
    return SeriesCheckResult(b_n, bound, b_n <= bound * (1 + _SLACK) + _SLACK)


def log_bound_check(series: NonnegSeries, n: int) -> SeriesCheckResult:
    """B_N = sum a_n / S_n (exact) against 1 + log(S_N) - log(a_1)."""
    sums = series.prefix_sums(n)
    b_n = sum((a / s for a, s in zip(series.terms[:n], sums)), Fraction(0))
    bound = 1 + _log_frac(sums[-1]) - _log_frac(series.terms[0])
    return SeriesCheckResult(float(b_n), bound, float(b_n) <= bound + _SLACK)
