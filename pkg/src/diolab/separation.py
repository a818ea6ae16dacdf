"""Certification of the pairwise separation property of denominator sequences.

A pair (q_m, q_n) with m < n violates separation at exponent alpha when some
s <= m**5, t >= 1 gives 1 <= |s*q_m - t*q_n| < q_m**alpha.  Deciding this
needs the minimum nonzero value of the linear form |s*q_m - t*q_n| over a
huge range of s (m**5 reaches 10^10 already at m = 100), which is found
through the continued-fraction expansion of q_m/q_n: after removing
g = gcd(q_m, q_n), the running minima of |s*a - t*b| over s occur at
convergent denominators of a/b, plus the clamped candidate forced by t >= 1.
The fast path is guarded by an exhaustive oracle with the same contract.

alpha is restricted to rationals p/r so that `value < q_m**alpha` is decided
exactly as value**r < q_m**p in big integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .sequences import DenominatorSequence, PolyGrowthParams

BRUTE_FORCE_LIMIT = 10**6


def poly_growth_threshold(seq: DenominatorSequence, params: PolyGrowthParams,
                          upto: int) -> Optional[int]:
    """First index m from which the block construction provably satisfies
    separation at alpha = 1/rho1, among the blocks realized in the first
    `upto` terms.

    Cross-block pairs need |s q_m| < q_n / 2, which the construction
    guarantees once the anchor satisfies n_k**(rho2 - 6 rho1) >= 4c (the
    factor 4 absorbs the floors; conservative).  Within-block pairs hold for
    every index.  Returns None when no realized anchor qualifies.
    """
    seq.prefix(upto)
    anchors = seq.provenance.get("realized_anchors") or []
    exp = params.rho2 - 6 * params.rho1
    a, b = exp.numerator, exp.denominator
    cn, cd = params.c.numerator, params.c.denominator
    first_index = 1
    for n_k in anchors:
        if n_k**a * cd**b >= 4**b * cn**b:
            return first_index
        first_index += params.block_length(n_k)
    return None


@dataclass(frozen=True)
class SeparationQuery:
    q_m: int
    q_n: int
    m: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not 1 <= self.q_m < self.q_n:
            raise ValueError("need 1 <= q_m < q_n")
        if self.m < 1:
            raise ValueError("need m >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("need alpha in (0, 1)")


@dataclass(frozen=True)
class ViolationCertificate:
    s: int
    t: int
    value: int

    def validate(self, query: SeparationQuery) -> None:
        if abs(self.s * query.q_m - self.t * query.q_n) != self.value:
            raise AssertionError("certificate value mismatch")
        if not (1 <= self.value and self.t >= 1 and 1 <= self.s <= query.m**5):
            raise AssertionError("certificate out of range")
        p, r = query.alpha.numerator, query.alpha.denominator
        if not self.value**r < query.q_m**p:
            raise AssertionError("certificate does not beat q_m**alpha")


def _value_at(s: int, a: int, b: int) -> Tuple[int, int]:
    """Minimum nonzero |s*a - t*b| over t >= 1 for fixed s, with its t."""
    sa = s * a
    if sa < b:
        return b - sa, 1
    t0, r = divmod(sa, b)
    if r == 0:
        return b, (t0 - 1) if t0 > 1 else (t0 + 1)
    if r <= b - r:
        return r, t0
    return b - r, t0 + 1


def min_linear_form(q_m: int, q_n: int, s_max: int) -> Tuple[int, int, int]:
    """A minimizer (s, t, v) of the nonzero values |s*q_m - t*q_n| over
    1 <= s <= s_max, t >= 1, computed via continued fractions in O(log q_n).
    """
    if not 1 <= q_m < q_n:
        raise ValueError("need 1 <= q_m < q_n")
    if s_max < 1:
        raise ValueError("need s_max >= 1")
    g = math.gcd(q_m, q_n)
    a, b = q_m // g, q_n // g

    candidates: List[Tuple[int, int, int]] = []  # (v, s, t) in reduced units

    # Largest s with s*a < b: the best of the t=1-forced region.
    s0 = (b - 1) // a
    s1 = min(s_max, s0)
    candidates.append((b - s1 * a, s1, 1))

    # Convergent denominators of a/b (numerators >= 1), skipping the exact hit.
    # h_i = a_i h_{i-1} + h_{i-2} seeded with h_{-2}, h_{-1} = 0, 1 and
    # k_{-2}, k_{-1} = 1, 0.
    num, den = a, b
    h_m2, h_m1 = 0, 1
    k_m2, k_m1 = 1, 0
    while den:
        digit, rem = divmod(num, den)
        num, den = den, rem
        h_m2, h_m1 = h_m1, digit * h_m1 + h_m2
        k_m2, k_m1 = k_m1, digit * k_m1 + k_m2
        if k_m1 > s_max:
            break
        if h_m1 >= 1:
            v = abs(k_m1 * a - h_m1 * b)
            if v:
                candidates.append((v, k_m1, h_m1))

    v, s, t = min(candidates)
    return s, t, g * v


def min_linear_form_brute(q_m: int, q_n: int, s_max: int) -> Tuple[int, int, int]:
    """Exhaustive oracle for min_linear_form; same contract, s_max capped."""
    if not 1 <= q_m < q_n:
        raise ValueError("need 1 <= q_m < q_n")
    if not 1 <= s_max <= BRUTE_FORCE_LIMIT:
        raise ValueError(f"need 1 <= s_max <= {BRUTE_FORCE_LIMIT}")
    g = math.gcd(q_m, q_n)
    a, b = q_m // g, q_n // g
    best = None
    for s in range(1, s_max + 1):
        v, t = _value_at(s, a, b)
        if best is None or v < best[0]:
            best = (v, s, t)
            if v == 1:
                break
    v, s, t = best
    return s, t, g * v


def find_violation(query: SeparationQuery) -> Optional[ViolationCertificate]:
    """Solve the separation system for one pair.

    Returns a certificate iff some s <= m**5, t >= 1 gives
    1 <= |s*q_m - t*q_n| < q_m**alpha (exact comparison); the pair violates
    exactly when the minimal nonzero form value does.
    """
    s, t, v = min_linear_form(query.q_m, query.q_n, query.m**5)
    p, r = query.alpha.numerator, query.alpha.denominator
    if v**r < query.q_m**p:
        cert = ViolationCertificate(s=s, t=t, value=v)
        cert.validate(query)
        return cert
    return None


@dataclass
class SeparationReport:
    alpha: Fraction
    m0: int
    upto: int
    checked_pairs: int
    violations: List[Tuple[int, int, ViolationCertificate]] = field(default_factory=list)

    @property
    def separated(self) -> bool:
        return not self.violations

    @property
    def separated_up_to(self) -> Optional[int]:
        return self.upto if self.separated else None

    def first_violation(self) -> Optional[Tuple[int, int, ViolationCertificate]]:
        return self.violations[0] if self.violations else None

    def to_dict(self) -> dict:
        doc = {"alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
               "m0": self.m0, "upto": self.upto, "checked_pairs": self.checked_pairs}
        if self.separated:
            doc["separated_up_to"] = self.upto
        else:
            doc["violations"] = [
                {"m": m, "n": n, "s": c.s, "t": c.t, "value": str(c.value)}
                for m, n, c in self.violations]
        return doc


def certify_sequence(seq: DenominatorSequence, alpha: Fraction, m0: int, upto: int,
                     exhaustive: bool = False) -> SeparationReport:
    """Scan all pairs m0 <= m < n <= upto in lexicographic order.

    Stops at the earliest violating pair unless `exhaustive`, in which case
    every violation is collected.
    """
    if m0 < 1 or upto <= m0:
        raise ValueError("need 1 <= m0 < upto")
    alpha = Fraction(alpha)
    terms = seq.prefix(upto)
    if len(terms) < upto:
        raise ValueError(f"sequence has only {len(terms)} terms, need {upto}")
    report = SeparationReport(alpha=alpha, m0=m0, upto=upto, checked_pairs=0)
    for m in range(m0, upto + 1):
        for n in range(m + 1, upto + 1):
            query = SeparationQuery(q_m=terms[m - 1], q_n=terms[n - 1], m=m, alpha=alpha)
            report.checked_pairs += 1
            cert = find_violation(query)
            if cert is not None:
                report.violations.append((m, n, cert))
                if not exhaustive:
                    return report
    return report
