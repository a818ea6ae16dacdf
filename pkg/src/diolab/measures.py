"""Measure samplers, empirical Fourier transforms, and decay auditing.

A probability measure on [0,1) is represented by a seeded cloud of dyadic
sample points.  Sampling is keyed per index, so a cloud is reproducible and
independent of how samples are distributed over workers.  The Fourier
transform mu_hat(t) = E[exp(-2*pi*i*t*x)] is estimated from the cloud; for
probe frequencies beyond float-product range the phase t*x mod 1 is reduced
in exact integer arithmetic before any rounding.

Self-similar (Cantor-type) measures get an exact transform through their
product formula, which doubles as the oracle for the empirical estimator and
as the negative control for decay audits: |mu_hat| along powers of the base
does not vanish.

"O(.)" style verdicts here are finite-range boundedness reports (max value
plus a log-log trend slope), never asymptotic claims.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .core import (ApproxFunction, ClassificationError, DEFAULT_PRECISION_BITS,
                   DyadicPoint, mix_seed)
from .sequences import DenominatorSequence, GrowthModel

TWO_PI = 2.0 * math.pi

# floats carry the phase t*x exactly enough below this; above, reduce mod 1
# in integers first
_FLOAT_PHASE_LIMIT = 1 << 30


@dataclass(frozen=True)
class MeasureSpec:
    """Sampler specification.

    kinds:
      lebesgue                      uniform on [0,1)
      poly_density(degree=d)        density (d+1) x**d
      cantor(base=b, digits=D)      base-b expansions with digits drawn from D
      cantor_smoothed(..., sigma)   cantor plus a mod-1 Gaussian of width sigma
      point_masses(atoms=[(x, w)])  discrete mixture (diagnostic use)
    """

    kind: str
    degree: int = 0
    base: int = 0
    digits: Tuple[int, ...] = ()
    sigma: float = 0.0
    atoms: Tuple[Tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def lebesgue(cls) -> "MeasureSpec":
        return cls("lebesgue")

    @classmethod
    def poly_density(cls, degree: int) -> "MeasureSpec":
        if degree < 1:
            raise ValueError("degree must be >= 1")
        return cls("poly_density", degree=degree)

    @classmethod
    def cantor(cls, base: int, digits: Iterable[int]) -> "MeasureSpec":
        ds = tuple(sorted(set(int(d) for d in digits)))
        if base < 2:
            raise ValueError("base must be >= 2")
        if not all(0 <= d < base for d in ds):
            raise ValueError("digits must lie in [0, base)")
        if not 2 <= len(ds) < base:
            raise ValueError("need >= 2 digits forming a proper subset")
        return cls("cantor", base=base, digits=ds)

    @classmethod
    def cantor_smoothed(cls, base: int, digits: Iterable[int], sigma: float) -> "MeasureSpec":
        spec = cls.cantor(base, digits)
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("cantor_smoothed", base=spec.base, digits=spec.digits, sigma=float(sigma))

    @classmethod
    def point_masses(cls, atoms: Iterable[Tuple[Fraction, Fraction]]) -> "MeasureSpec":
        pts = [(Fraction(x) % 1, Fraction(w)) for x, w in atoms]
        total = sum(w for _, w in pts)
        if not pts or any(w < 0 for _, w in pts) or total <= 0:
            raise ValueError("need nonnegative weights with positive total")
        return cls("point_masses", atoms=tuple((x, w / total) for x, w in pts))

    def describe(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind == "poly_density":
            doc["degree"] = self.degree
        if self.kind in ("cantor", "cantor_smoothed"):
            doc.update(base=self.base, digits=list(self.digits))
        if self.kind == "cantor_smoothed":
            doc["sigma"] = self.sigma
        if self.kind == "point_masses":
            doc["atoms"] = [[str(x), str(w)] for x, w in self.atoms]
        return doc


def _cantor_digit_count(base: int, bits: int) -> int:
    j = 1
    while base**j < (1 << bits):
        j += 1
    return j


def _draw_one(spec: MeasureSpec, rng: random.Random, bits: int) -> int:
    """One sample numerator on the 2**bits grid."""
    if spec.kind == "lebesgue":
        return rng.getrandbits(bits)
    if spec.kind == "poly_density":
        # inverse CDF of (d+1) x**d on [0,1]
        x = rng.random() ** (1.0 / (spec.degree + 1))
        return _float_to_num(x, bits)
    if spec.kind in ("cantor", "cantor_smoothed"):
        j = _cantor_digit_count(spec.base, bits)
        if len(spec.digits) == 2:
            lo, hi = spec.digits
            mask = rng.getrandbits(j)
            # binary digit string read in base b gives sum(bit_i * b**(j-1-i))
            x_int = int(bin(mask)[2:].zfill(j), spec.base)
            x_int = x_int * (hi - lo) + lo * ((spec.base**j - 1) // (spec.base - 1))
        else:
            x_int = 0
            for _ in range(j):
                x_int = x_int * spec.base + spec.digits[rng.randrange(len(spec.digits))]
        num = (x_int << bits) // spec.base**j
        if spec.kind == "cantor_smoothed":
            shift = _float_to_num(rng.gauss(0.0, spec.sigma) % 1.0, bits)
            num = (num + shift) % (1 << bits)
        return num
    if spec.kind == "point_masses":
        u = Fraction.from_float(rng.random())
        acc = Fraction(0)
        for x, w in spec.atoms:
            acc += w
            if u < acc:
                return (x.numerator << bits) // x.denominator
        x = spec.atoms[-1][0]
        return (x.numerator << bits) // x.denominator
    raise ValueError(f"unknown measure kind {spec.kind!r}")


def _float_to_num(x: float, bits: int) -> int:
    f = Fraction.from_float(x % 1.0)
    return (f.numerator << bits) // f.denominator


def sample(spec: MeasureSpec, count: int, seed: int,
           bits: int = DEFAULT_PRECISION_BITS) -> List[DyadicPoint]:
    """count i.i.d. draws; draw i depends only on (seed, i)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    for i in range(count):
        rng = random.Random(mix_seed(seed, i))
        out.append(DyadicPoint(_draw_one(spec, rng, bits), bits))
    return out


def _sample_chunk(args) -> List[Tuple[int, int]]:
    spec, indices, seed, bits = args
    return [(i, _draw_one(spec, random.Random(mix_seed(seed, i)), bits)) for i in indices]


def sample_parallel(spec: MeasureSpec, count: int, seed: int,
                    bits: int = DEFAULT_PRECISION_BITS, threads: int = 1) -> List[DyadicPoint]:
    """Same draws as `sample` regardless of thread count: substreams are
    keyed by index and reassembled in index order."""
    if threads <= 1 or count < 2:
        return sample(spec, count, seed, bits)
    from concurrent.futures import ProcessPoolExecutor
    n_chunks = min(threads * 4, count)
    payloads = [(spec, list(range(c, count, n_chunks)), seed, bits) for c in range(n_chunks)]
    results: List[Tuple[int, int]] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_sample_chunk, payloads):
            results.extend(part)
    results.sort()
    return [DyadicPoint(num, bits) for _, num in results]


class MuHatEstimate(NamedTuple):
    value: complex
    stderr: float


class EmpiricalCloud:
    """Sample cloud with cached representations for transform estimation."""

    def __init__(self, points: Sequence[DyadicPoint], spec: Optional[MeasureSpec] = None,
                 seed: Optional[int] = None):
        if not points:
            raise ValueError("need at least one sample")
        self.bits = points[0].precision_bits
        if any(p.precision_bits != self.bits for p in points):
            raise ValueError("mixed precisions in one cloud")
        self.nums = [p.numerator for p in points]
        self.spec = spec
        self.seed = seed
        self._xs = np.array([n / (1 << self.bits) for n in self.nums], dtype=float)

    @classmethod
    def from_spec(cls, spec: MeasureSpec, count: int, seed: int,
                  bits: int = DEFAULT_PRECISION_BITS) -> "EmpiricalCloud":
        return cls(sample(spec, count, seed, bits), spec=spec, seed=seed)

    def __len__(self):
        return len(self.nums)

    def mu_hat(self, t: int) -> complex:
        if t == 0:
            return 1.0 + 0.0j
        if abs(t) <= _FLOAT_PHASE_LIMIT:
            return complex(np.exp(-2j * math.pi * t * self._xs).mean())
        modulus = 1 << self.bits
        scale = -TWO_PI / modulus
        acc = 0.0 + 0.0j
        for n in self.nums:
            acc += cmath.exp(1j * (scale * ((t * n) % modulus)))
        return acc / len(self.nums)

    def estimate(self, t: int) -> MuHatEstimate:
        return MuHatEstimate(self.mu_hat(t), 1.0 / math.sqrt(len(self.nums)))

    def source(self) -> Callable[[int], complex]:
        return self.mu_hat


def empirical_mu_hat(samples: Sequence[DyadicPoint], t: int) -> MuHatEstimate:
    """(1/M) sum exp(-2*pi*i*t*x_j) with a 1/sqrt(M) standard error attached."""
    return EmpiricalCloud(samples).estimate(t)


def cantor_mu_hat_exact(base: int, digits: Iterable[int], t: int,
                        depth: int = 60) -> Tuple[complex, float]:
    """Truncated self-similar product for the transform of the cantor measure.

    mu_hat(t) = prod_{j=1..depth} mean_{d in digits} exp(-2*pi*i*t*d/base**j),
    with truncation error bounded by 2*pi*|t|*base**-depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    ds = tuple(sorted(set(int(d) for d in digits)))
    prod = 1.0 + 0.0j
    bj = 1
    for _ in range(depth):
        bj *= base
        acc = 0.0 + 0.0j
        for d in ds:
            acc += cmath.exp(-2j * math.pi * (((t * d) % bj) / bj))
        prod *= acc / len(ds)
    if t == 0:
        err = 0.0
    else:
        log_err = math.log(TWO_PI) + math.log(abs(t)) - depth * math.log(base)
        err = math.exp(log_err) if log_err < 700 else math.inf
    return prod, err


def lebesgue_mu_hat_exact(t: int) -> complex:
    """Transform of the uniform measure: 1 at t = 0, else exactly 0."""
    return 1.0 + 0.0j if t == 0 else 0.0 + 0.0j


def poly_density_mu_hat_exact(degree: int, t: int) -> complex:
    """Transform of density (degree+1) x**degree at integer t, closed form.

    I_d = int_0^1 x**d e(-t x) dx obeys I_d = -1/(2*pi*i*t) + d/(2*pi*i*t) I_{d-1}
    for integer t != 0 (boundary terms collapse since e(-t) = 1), I_0 = 0.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if t == 0:
        return 1.0 + 0.0j
    w = 2j * math.pi * t
    i_d = 0.0 + 0.0j
    for d in range(1, degree + 1):
        i_d = -1.0 / w + (d / w) * i_d
    return (degree + 1) * i_d


@dataclass(frozen=True)
class DecayModel:
    """Candidate envelope h(t) for |mu_hat(t)|, monotone decreasing.

    forms:
      power(c, a)       h(t) = c * t**-a            (t >= 1)
      logpow(c, a)      h(t) = c * (log t)**-a      (t >= 2)
      expsqrtlog(c2)    h(t) = exp(-c2 * sqrt(log(1 + t)))
    """

    form: str
    c: float = 1.0
    a: float = 1.0

    @classmethod
    def power(cls, c: float, a: float) -> "DecayModel":
        if c <= 0 or a <= 0:
            raise ValueError("need c > 0 and a > 0")
        return cls("power", c=float(c), a=float(a))

    @classmethod
    def logpow(cls, c: float, a: float) -> "DecayModel":
        if c <= 0 or a <= 0:
            raise ValueError("need c > 0 and a > 0")
        return cls("logpow", c=float(c), a=float(a))

    @classmethod
    def expsqrtlog(cls, c2: float) -> "DecayModel":
        if c2 <= 0:
            raise ValueError("need c2 > 0")
        return cls("expsqrtlog", a=float(c2))

    def __call__(self, t) -> float:
        if self.form == "power":
            if t < 1:
                raise ValueError("power model needs t >= 1")
            return self.c * math.exp(-self.a * math.log(t))
        if self.form == "logpow":
            if t < 2:
                raise ValueError("logpow model needs t >= 2")
            return self.c * math.log(t) ** (-self.a)
        return math.exp(-self.a * math.sqrt(math.log(1 + t)))

    def describe(self) -> dict:
        if self.form == "expsqrtlog":
            return {"form": self.form, "c2": self.a}
        return {"form": self.form, "c": self.c, "a": self.a}


def _loglog_slope(pairs: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(y) against log(x); 0 for < 2 usable points."""
    xs = [math.log(x) for x, y in pairs if x > 1 and y > 0]
    ys = [math.log(y) for x, y in pairs if x > 1 and y > 0]
    if len(xs) < 2 or max(xs) == min(xs):
        return 0.0
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den


@dataclass
class DecayAuditReport:
    balance_ratios: List[Tuple[int, float]]          # (n, h(q_n) * n**rho)
    balance_max: float
    balance_trend_slope: float
    balance_ok: bool
    probe_ratios: List[Tuple[int, float]]            # (t, |mu_hat(t)| / h(t))
    probe_max: Optional[float]
    probe_trend_slope: Optional[float]
    probe_ok: Optional[bool]
    warnings: List[str] = field(default_factory=list)


def decay_audit(model: DecayModel, rho: Fraction,
                seq_points: Iterable[Tuple[int, int]],
                mu_hat_source: Optional[Callable[[int], complex]] = None,
                probe_ts: Optional[Sequence[int]] = None,
                slope_tol: float = 0.05) -> DecayAuditReport:
    """Audit both halves of the balance condition over finite ranges.

    Half one checks h(q_n) = O(n**-rho) through the ratios h(q_n) * n**rho;
    half two (when a transform source is given) checks |mu_hat(t)| = O(h(t))
    through |mu_hat(t)| / h(t) over the probe grid.  Each half reports its
    max and log-log trend slope; `ok` means the trend slope stays below
    slope_tol.  rho <= 2 is allowed but flagged.
    """
    rho_f = float(Fraction(rho))
    warnings = []
    if rho_f <= 2:
        warnings.append("rho <= 2: outside the regime the counting theorem needs")
    ratios = []
    for n, q in seq_points:
        ratios.append((n, model(q) * math.exp(rho_f * math.log(n)) if n > 1 else model(q)))
    if not ratios:
        raise ValueError("empty audit range")
    balance_max = max(r for _, r in ratios)
    balance_slope = _loglog_slope([(float(n), r) for n, r in ratios])
    probe_ratios: List[Tuple[int, float]] = []
    probe_max = probe_slope = probe_ok = None
    if mu_hat_source is not None:
        if not probe_ts:
            raise ValueError("need probe_ts with a transform source")
        for t in probe_ts:
            probe_ratios.append((t, abs(mu_hat_source(t)) / model(t)))
        probe_max = max(r for _, r in probe_ratios)
        probe_slope = _loglog_slope([(float(t), r) for t, r in probe_ratios])
        probe_ok = probe_slope <= slope_tol
    return DecayAuditReport(
        balance_ratios=ratios, balance_max=balance_max,
        balance_trend_slope=balance_slope, balance_ok=balance_slope <= slope_tol,
        probe_ratios=probe_ratios, probe_max=probe_max,
        probe_trend_slope=probe_slope, probe_ok=probe_ok, warnings=warnings)


def seq_audit_points(seq: DenominatorSequence, n_from: int, n_to: int) -> List[Tuple[int, int]]:
    terms = seq.prefix(n_to)
    if len(terms) < n_to:
        raise ValueError("sequence too short for audit range")
    return [(n, terms[n - 1]) for n in range(n_from, n_to + 1)]


def probe_grid(ratio: float = 2.0, t_max: int = 1 << 20,
               structured: Iterable[int] = ()) -> List[int]:
    """Geometric grid floor(ratio**j) union a structured probe set."""
    ts = set(int(t) for t in structured if t != 0)
    t = 1.0
    while t <= t_max:
        ts.add(int(t))
        t *= ratio
    return sorted(ts)


@dataclass
class CriteriaAuditReport:
    """Truncated partial sums of the two convergence criteria.

    max_terms[n-1]      = max_{1 <= |k| <= K} |mu_hat(k q_n)|
    weighted_terms[n-1] = sum_{1 <= |k| <= K} |mu_hat(k q_n)| / |k|
    plus their running partial sums.  No convergence verdict is asserted;
    conjugate symmetry |mu_hat(-t)| = |mu_hat(t)| folds the sums over k > 0.
    """

    k_max: int
    n_max: int
    max_terms: List[float]
    weighted_terms: List[float]
    max_partials: List[float]
    weighted_partials: List[float]


def convergence_criteria_audit(mu_hat_source: Callable[[int], complex],
                               seq: DenominatorSequence,
                               k_max: int, n_max: int) -> CriteriaAuditReport:
    if k_max < 1 or n_max < 1:
        raise ValueError("need k_max >= 1 and n_max >= 1")
    terms = seq.prefix(n_max)
    if len(terms) < n_max:
        raise ValueError("sequence too short")
    max_terms, weighted_terms = [], []
    for n in range(1, n_max + 1):
        q = terms[n - 1]
        mags = [abs(mu_hat_source(k * q)) for k in range(1, k_max + 1)]
        max_terms.append(max(mags))
        weighted_terms.append(2.0 * sum(m / k for k, m in enumerate(mags, start=1)))
    max_partials = list(np.cumsum(max_terms))
    weighted_partials = list(np.cumsum(weighted_terms))
    return CriteriaAuditReport(k_max=k_max, n_max=n_max,
                               max_terms=max_terms, weighted_terms=weighted_terms,
                               max_partials=max_partials, weighted_partials=weighted_partials)


def tau_exponent(growth: GrowthModel, psi: ApproxFunction) -> Fraction:
    """Critical exponent inf{eta >= 0 : sum_q q * (psi(q)/q)**eta < inf} for
    the parametric pair q_n ~ n**g, psi(q) = c * q**-lam.

    The sum behaves like sum n**(g - eta g (1+lam)), finite iff the exponent
    drops below -1, so tau = (1 + 1/g) / (1 + lam).  Refuses anything
    non-parametric.
    """
    if growth.kind != "polynomial":
        raise ClassificationError(f"tau exponent needs polynomial growth, got {growth.kind}")
    if psi.family != "power":
        raise ClassificationError(f"tau exponent needs a power-family psi, got {psi.family}")
    g = growth.param
    lam = psi.params["lam"]
    if lam < 0:
        raise ClassificationError("tau exponent needs lam >= 0")
    return (1 + Fraction(1) / g) / (1 + lam)


@dataclass
class TauProbe:
    eta: float
    checkpoint_sums: List[Tuple[int, float]]
    tail_ratio: float
    verdict: str  # "convergent" | "divergent" | "inconclusive"


def tau_growth_probe(growth: GrowthModel, psi: ApproxFunction, eta: float,
                     n_terms: int = 10**6, checkpoint: int = 10**5,
                     low: float = 0.05, high: float = 0.5) -> TauProbe:
    """Corroborate tau by the growth of truncations of sum q (psi(q)/q)**eta
    under the model q_n = n**g: a convergent exponent plateaus past the
    checkpoint, a divergent one keeps growing by a constant factor.
    """
    if growth.kind != "polynomial" or psi.family != "power":
        raise ClassificationError("growth probe needs the parametric families")
    g = float(growth.param)
    lam = float(psi.params["lam"])
    exponent = g * (1.0 - eta * (1.0 + lam))
    ns = np.arange(1, n_terms + 1, dtype=float)
    terms = ns**exponent
    s_mid = float(terms[:checkpoint].sum())
    s_end = float(terms.sum())
    tail_ratio = (s_end - s_mid) / s_mid
    verdict = "convergent" if tail_ratio < low else ("divergent" if tail_ratio > high else "inconclusive")
    return TauProbe(eta=eta, checkpoint_sums=[(checkpoint, s_mid), (n_terms, s_end)],
                    tail_ratio=tail_ratio, verdict=verdict)
