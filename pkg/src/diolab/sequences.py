"""Denominator sequence constructors and growth auditors.

Sequences are lazy streams of strictly increasing big integers with
provenance metadata, so a prefix can be regenerated bit-for-bit from its
parameters.  The block constructions (`gen_poly_growth` and its prime
variant) never materialize a whole block: block k holds up to
floor(n_k**(rho1-1)) multiples of the anchor n_k, which is astronomically
many for k >= 2, while callers only ever consume a few thousand terms.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

import mpmath

from .core import mix_seed, rational_power_floor, rational_to_str

# Deterministic Miller-Rabin witnesses, valid below 3.317e24 (Sorenson-Webster).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(n: int, extra_rounds: int = 40) -> Tuple[bool, bool]:
    """Primality test.  Returns (is_prime, deterministic).

    Below 3.3e24 the fixed witness set is a proof; above, extra seeded
    witnesses make the error probability < 4**-rounds and the second flag
    drops to False so provenance can record the certificate grade.
    """
    if n < 2:
        return False, True
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p, True
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1

    def witness_composite(a: int) -> bool:
        x = pow(a, d, n)
        if x in (1, n - 1):
            return False
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    for a in _MR_WITNESSES:
        if witness_composite(a):
            return False, True
    if n < _MR_DETERMINISTIC_LIMIT:
        return True, True
    rng = random.Random(n % (1 << 64))
    for _ in range(extra_rounds):
        if witness_composite(rng.randrange(2, n - 1)):
            return False, True
    return True, False


def primes_up_to(n: int) -> List[int]:
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p:: p] = b"\x00" * len(range(p * p, n + 1, p))
    return [i for i, v in enumerate(sieve) if v]


def prime_stream() -> Iterator[int]:
    """Unbounded ascending primes via growing sieve segments."""
    limit = 1 << 10
    emitted = 0
    while True:
        ps = primes_up_to(limit)
        yield from ps[emitted:]
        emitted = len(ps)
        limit *= 4


def smallest_prime_at_least(lo: int, hi: int) -> int:
    v = max(lo, 2)
    if v == 2:
        if hi >= 2:
            return 2
        raise ValueError(f"no prime in [{lo}, {hi}]")
    if v % 2 == 0:
        v += 1
    while v <= hi:
        if is_prime(v)[0]:
            return v
        v += 2
    raise ValueError(f"no prime in [{lo}, {hi}]")


class DenominatorSequence:
    """Lazily generated strictly increasing sequence of positive integers.

    The materialized prefix is cached and append-only; the provenance dict
    carries the construction tag and parameters needed to regenerate it
    exactly.
    """

    def __init__(self, factory: Callable[[], Iterator[int]], provenance: dict):
        self._factory = factory
        self.provenance = provenance
        self._cache: List[int] = []
        self._iter: Optional[Iterator[int]] = None
        self._exhausted = False

    def prefix(self, n: int) -> List[int]:
        """First n terms (fewer if the stream is finite and shorter)."""
        if self._iter is None:
            self._iter = self._factory()
        while len(self._cache) < n and not self._exhausted:
            try:
                term = next(self._iter)
            except StopIteration:
                self._exhausted = True
                break
            if self._cache and term <= self._cache[-1]:
                raise ValueError(
                    f"sequence not strictly increasing at index {len(self._cache) + 1}: "
                    f"{self._cache[-1]} -> {term}")
            if term < 1:
                raise ValueError("sequence terms must be >= 1")
            self._cache.append(term)
        return self._cache[:n]

    def term(self, n: int) -> int:
        """1-based term access."""
        pre = self.prefix(n)
        if len(pre) < n:
            raise IndexError(f"sequence has only {len(pre)} terms")
        return pre[n - 1]

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            pre = self.prefix(i + 1)
            if len(pre) <= i:
                return
            yield pre[i]
            i += 1

    @classmethod
    def from_terms(cls, terms: Sequence[int], tag: str = "literal", **params) -> "DenominatorSequence":
        terms = [int(t) for t in terms]
        return cls(lambda: iter(terms), {"kind": tag, "count": len(terms), **params})

    def write(self, path: str, n: Optional[int] = None) -> None:
        """Newline-delimited decimal terms under a JSON provenance header."""
        terms = self.prefix(n) if n is not None else list(self)
        with open(path, "w") as fh:
            fh.write(json.dumps({"provenance": self.provenance, "count": len(terms)},
                                sort_keys=True) + "\n")
            for t in terms:
                fh.write(f"{t}\n")

    @classmethod
    def read(cls, path: str) -> "DenominatorSequence":
        with open(path) as fh:
            header = json.loads(fh.readline())
            terms = [int(line) for line in fh if line.strip()]
        seq = cls.from_terms(terms)
        seq.provenance = dict(header.get("provenance", {}), imported_from=path)
        return seq


def gen_geometric(a: int, n_terms: int) -> DenominatorSequence:
    """a, a**2, ..., a**n_terms."""
    if a < 2:
        raise ValueError("base must be >= 2")
    if n_terms < 1:
        raise ValueError("need at least one term")

    def factory():
        v = 1
        for _ in range(n_terms):
            v *= a
            yield v

    return DenominatorSequence(factory, {"kind": "geometric", "a": a, "n": n_terms})


def gen_smooth(primes: Iterable[int], n_terms: int) -> DenominatorSequence:
    """First n_terms integers > 1 whose prime factors all lie in `primes`."""
    ps = sorted(set(int(p) for p in primes))
    if not ps:
        raise ValueError("need at least one prime")
    for p in ps:
        if not is_prime(p)[0]:
            raise ValueError(f"{p} is not prime")
    if n_terms < 1:
        raise ValueError("need at least one term")

    def factory():
        heap = list(ps)
        heapq.heapify(heap)
        seen = set(heap)
        for _ in range(n_terms):
            v = heapq.heappop(heap)
            yield v
            for p in ps:
                w = v * p
                if w not in seen:
                    seen.add(w)
                    heapq.heappush(heap, w)

    return DenominatorSequence(factory, {"kind": "smooth", "primes": ps, "n": n_terms})


@dataclass(frozen=True)
class PolyGrowthParams:
    """Parameters of the anchored-multiples construction.

    Requires 1 < rho1, 6*rho1 < rho2, c > 1, and n1 >= 2 large enough that
    c * n1**rho1 < n1**rho2, which keeps consecutive blocks disjoint.
    """

    rho1: Fraction
    rho2: Fraction
    c: Fraction
    n1: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rho1", Fraction(self.rho1))
        object.__setattr__(self, "rho2", Fraction(self.rho2))
        object.__setattr__(self, "c", Fraction(self.c))
        if not 1 < self.rho1:
            raise ValueError("need rho1 > 1")
        if not 6 * self.rho1 < self.rho2:
            raise ValueError("need 6*rho1 < rho2")
        if not self.c > 1:
            raise ValueError("need c > 1")
        if self.n1 < 2:
            raise ValueError("need n1 >= 2")
        if not self.block_gap_ok(self.n1):
            raise ValueError("n1 too small: need c * n1**rho1 < n1**rho2")

    def block_gap_ok(self, n_k: int) -> bool:
        # c * n_k**rho1 < n_k**rho2, cross-multiplied to integer powers
        a1, b1 = self.rho1.numerator, self.rho1.denominator
        a2, b2 = self.rho2.numerator, self.rho2.denominator
        lhs = self.c.numerator ** (b1 * b2) * n_k ** (a1 * b2)
        rhs = self.c.denominator ** (b1 * b2) * n_k ** (a2 * b1)
        return lhs < rhs

    def anchor_bracket(self, n_k: int) -> Tuple[int, int]:
        """Admissible integer range for the next anchor:
        ceil(floor(n_k**rho2) / c) .. floor(n_k**rho2)."""
        top = rational_power_floor(n_k, self.rho2)
        lo = -((-top * self.c.denominator) // self.c.numerator)
        return lo, top

    def block_length(self, n_k: int) -> int:
        """floor(n_k**(rho1 - 1)), the multiplier range of block k."""
        return rational_power_floor(n_k, self.rho1 - 1)


def _poly_growth_factory(params: PolyGrowthParams, prime_variant: bool,
                         provenance: dict,
                         anchors_override: Optional[Sequence[int]]) -> Callable[[], Iterator[int]]:
    pinned = list(anchors_override) if anchors_override else []

    def factory() -> Iterator[int]:
        n_k = pinned[0] if pinned else params.n1
        prev_last = 0
        for k in itertools.count(1):
            if k > 1:
                lo, hi = params.anchor_bracket(n_k)
                if k <= len(pinned):
                    n_k = pinned[k - 1]
                    if not lo <= n_k <= hi:
                        raise ValueError(f"pinned anchor {n_k} outside bracket [{lo}, {hi}]")
                elif prime_variant:
                    n_k = smallest_prime_at_least(lo, hi)
                    if not is_prime(n_k)[1]:
                        provenance["primality"] = "probabilistic"
                else:
                    rng = random.Random(mix_seed(params.seed, k))
                    n_k = lo + rng.randrange(hi - lo + 1)
            realized = provenance.setdefault("realized_anchors", [])
            if len(realized) < k:
                realized.append(n_k)
            if n_k <= prev_last:
                raise ValueError("block overlap: anchor grew too slowly")
            s_max = params.block_length(n_k)
            if prime_variant:
                for s in prime_stream():
                    if s > s_max:
                        break
                    yield s * n_k
            else:
                for s in range(1, s_max + 1):
                    yield s * n_k
            prev_last = s_max * n_k

    return factory


def gen_poly_growth(params: PolyGrowthParams, n_terms: int,
                    anchors: Optional[Sequence[int]] = None) -> DenominatorSequence:
    """Ascending union of blocks {s * n_k : 1 <= s <= floor(n_k**(rho1-1))}.

    Each next anchor n_{k+1} is drawn (seeded) from its admissible bracket.
    `anchors` pins the realized anchors instead, e.g. to rebuild the superset
    sequence matching a prime-variant run.
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    prov = {"kind": "poly", "rho1": rational_to_str(params.rho1),
            "rho2": rational_to_str(params.rho2), "c": rational_to_str(params.c),
            "n1": params.n1, "seed": params.seed, "n": n_terms,
            "primality": "deterministic"}
    inner = _poly_growth_factory(params, False, prov, anchors)
    return DenominatorSequence(lambda: itertools.islice(inner(), n_terms), prov)


def gen_poly_growth_prime(params: PolyGrowthParams, n_terms: int) -> DenominatorSequence:
    """Prime variant: anchors are the smallest primes in their brackets and
    the multipliers s run over primes <= floor(n_k**(rho1-1)).

    The construction is usually stated with c = 2; any c >= 2 is accepted
    and recorded in provenance.
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    if params.c < 2:
        raise ValueError("prime variant needs c >= 2")
    if not is_prime(params.n1)[0]:
        raise ValueError("prime variant needs a prime n1")
    prov = {"kind": "poly-prime", "rho1": rational_to_str(params.rho1),
            "rho2": rational_to_str(params.rho2), "c": rational_to_str(params.c),
            "n1": params.n1, "n": n_terms, "primality": "deterministic"}
    if params.c != 2:
        prov["note"] = "c != 2 accepted; construction stated for c = 2"
    inner = _poly_growth_factory(params, True, prov, None)
    return DenominatorSequence(lambda: itertools.islice(inner(), n_terms), prov)


@dataclass
class GrowthAuditReport:
    """Slopes log(q_m)/log(m) over the audited range against a fixed bound."""

    slopes: List[Tuple[int, float]]
    max_slope: float
    argmax: Optional[int]
    bound: float
    audit_start: int
    passed: bool


def growth_slope_audit(seq: DenominatorSequence, params: PolyGrowthParams, n_terms: int,
                       epsilon: float = 0.0) -> GrowthAuditReport:
    """Check log(q_m)/log(m) <= rho2/(rho1-1) + 1 (+ epsilon) for all audited
    m > floor(n1**(rho1-1)).  An empty audit range passes vacuously.
    """
    bound = float(params.rho2 / (params.rho1 - 1) + 1) + epsilon
    start = params.block_length(params.n1) + 1
    terms = seq.prefix(n_terms)
    slopes = [(m, math.log(terms[m - 1]) / math.log(m))
              for m in range(max(start, 2), len(terms) + 1)]
    max_slope = max((s for _, s in slopes), default=float("-inf"))
    argmax = max(slopes, key=lambda t: t[1])[0] if slopes else None
    return GrowthAuditReport(slopes=slopes, max_slope=max_slope, argmax=argmax,
                             bound=bound, audit_start=start,
                             passed=(not slopes) or max_slope <= bound)


def liouville_growth_check(seq: DenominatorSequence, rho: Fraction, c2: Fraction,
                           n0: int, n_terms: int) -> Tuple[bool, Optional[int]]:
    """Whether log(q_n) >= ((rho/c2) * log n)**2 for all n in [n0, n_terms].

    Floats decide except within a 1e-9 relative margin, where the comparison
    escalates to 60-digit arithmetic; a residual tie within 1e-50 counts as a
    pass (the inequality is non-strict).  Returns (ok, first_failure_index).
    """
    if n_terms < n0:
        raise ValueError("n_terms must be >= n0")
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    ratio = Fraction(rho) / Fraction(c2)
    terms = seq.prefix(n_terms)
    if len(terms) < n_terms:
        raise ValueError("sequence too short")
    for n in range(n0, n_terms + 1):
        q = terms[n - 1]
        lhs = math.log(q)
        rhs = (float(ratio) * math.log(n)) ** 2
        if abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs)):
            with mpmath.workdps(60):
                lhs_m = mpmath.log(q)
                rhs_m = (mpmath.mpf(ratio.numerator) / ratio.denominator * mpmath.log(n)) ** 2
                if lhs_m < rhs_m and abs(lhs_m - rhs_m) > mpmath.mpf(10) ** -50 * max(1, abs(rhs_m)):
                    return False, n
        elif lhs < rhs:
            return False, n
    return True, None


@dataclass(frozen=True)
class GrowthModel:
    """Declared asymptotic family of a denominator sequence, consumed by the
    symbolic convergence classifier.

    kind:
      geometric    q_n ~ a**n              (param = a)
      polynomial   q_n ~ n**g              (param = g)
      exp_power    log q_n ~ C * n**(1/k)  (param = k), e.g. smooth numbers
    """

    kind: str
    param: Fraction

    def __post_init__(self):
        if self.kind not in {"geometric", "polynomial", "exp_power"}:
            raise ValueError(f"unknown growth kind {self.kind!r}")
        object.__setattr__(self, "param", Fraction(self.param))
        if self.param <= 0:
            raise ValueError("growth parameter must be positive")
