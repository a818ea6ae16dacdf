"""Exact arithmetic primitives shared by every other module.

All scalar quantities (approximation values, shifts, thresholds) are
`fractions.Fraction`; sample points are dyadic rationals with a fixed bit
precision.  Membership tests clear denominators and compare integers, so
they stay correct for denominators far beyond float range (q ~ 10^50).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

Rational = Fraction

DEFAULT_PRECISION_BITS = 128


class ClassificationError(ValueError):
    """Raised when a symbolic classifier refuses a non-parametric input
    instead of guessing from partial sums."""

#: extra fractional bits kept when an exact power would be irrational
_POWER_FLOOR_BITS = 128


def mix_seed(*parts: int) -> int:
    """Deterministic 64-bit stream key from integer parts (splitmix64 chain).

    Keys per-item RNG substreams so results are independent of worker layout.
    """
    z = 0x9E3779B97F4A7C15
    for p in parts:
        z = (z + int(p)) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        z ^= z >> 31
    return z


def rational_from_str(s: str) -> Fraction:
    """Parse 'p/q' or a plain integer/decimal string into a Fraction."""
    return Fraction(s.strip())


def rational_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def nth_root_floor(x: int, n: int) -> int:
    """floor(x**(1/n)) for nonnegative integer x, exact."""
    if x < 0 or n < 1:
        raise ValueError("nth_root_floor requires x >= 0 and n >= 1")
    if n == 1 or x in (0, 1):
        return x
    if n == 2:
        return math.isqrt(x)
    if x.bit_length() <= n:
        return 1
    # Integer Newton, seeded above the root so the sequence decreases.
    r = 1 << -(-x.bit_length() // n)
    while True:
        t = ((n - 1) * r + x // r ** (n - 1)) // n
        if t >= r:
            break
        r = t
    while r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def rational_power_floor(base: int, exponent: Fraction) -> int:
    """floor(base**exponent) for integer base >= 1 and rational exponent >= 0.

    Float flooring is wrong near integer boundaries, so this reduces to an
    integer root: floor(b**(p/r)) = floor((b**p)**(1/r)).
    """
    if base < 1:
        raise ValueError("base must be >= 1")
    exponent = Fraction(exponent)
    if exponent < 0:
        raise ValueError("exponent must be >= 0")
    p, r = exponent.numerator, exponent.denominator
    return nth_root_floor(base**p, r)


def dyadic_power_floor(base_num: int, base_den: int, exponent: Fraction, bits: int = _POWER_FLOOR_BITS) -> Fraction:
    """Largest multiple of 2**-bits that is <= (base_num/base_den)**(-exponent).

    Used to give irrational negative powers a deterministic rational value.
    """
    exponent = Fraction(exponent)
    p, r = exponent.numerator, exponent.denominator
    if p < 0:
        p, base_num, base_den = -p, base_den, base_num
    if base_num <= 0:
        raise ValueError("base must be positive")
    # floor(2**bits * (den/num)**(p/r)) = floor(((2**(bits*r) * den**p) // num**p)**(1/r))
    scaled = (1 << (bits * r)) * base_den**p // base_num**p
    return Fraction(nth_root_floor(scaled, r), 1 << bits)


def nearest_int_distance(x: Fraction) -> Fraction:
    """Distance from x to the nearest integer, exact, in [0, 1/2]."""
    r = Fraction(x) % 1
    return min(r, 1 - r)


def check_unit_interval(gamma: Fraction, name: str = "gamma") -> Fraction:
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {gamma}")
    return gamma


@dataclass(frozen=True)
class DyadicPoint:
    """Exact point x = numerator / 2**precision_bits in [0, 1)."""

    numerator: int
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if not 0 <= self.numerator < (1 << self.precision_bits):
            raise ValueError("numerator out of [0, 2**precision_bits)")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.precision_bits)

    @classmethod
    def from_fraction(cls, x: Fraction, precision_bits: int = DEFAULT_PRECISION_BITS) -> "DyadicPoint":
        x = Fraction(x) % 1
        num = (x.numerator << precision_bits) // x.denominator
        return cls(num, precision_bits)

    @classmethod
    def from_float(cls, x: float, precision_bits: int = DEFAULT_PRECISION_BITS) -> "DyadicPoint":
        return cls.from_fraction(Fraction.from_float(float(x) % 1.0), precision_bits)

    def as_float(self) -> float:
        return self.numerator / (1 << self.precision_bits)

    def to_hex(self) -> str:
        return f"{self.numerator:#x}:{self.precision_bits}"

    @classmethod
    def from_hex(cls, s: str) -> "DyadicPoint":
        num_s, _, bits_s = s.partition(":")
        return cls(int(num_s, 16), int(bits_s) if bits_s else DEFAULT_PRECISION_BITS)


class ApproxFunction:
    """Approximation function psi mapping a denominator q (or index n) to a
    rational in [0, 1].

    Families:
      power(c, lam)    psi(q) = min(1/2, c * q**(-lam))
      logpow(c, beta)  psi(q) = min(1/2, c * log(q + 2)**(-beta))
      constant(c)      psi(q) = c
      indexed(table)   psi(q_n) looked up per 1-based index n
      callback(fn)     fn(q, n) -> rational, clamped into [0, 1]

    Evaluation is deterministic.  Where the exact value would be irrational
    (non-integer rational exponents), the result is floored onto the grid of
    multiples of 2**-128, which keeps every downstream comparison exact.
    No monotonicity in q is imposed or assumed; callers that need it must
    check it themselves.
    """

    __slots__ = ("family", "params", "table", "fn")

    def __init__(self, family: str, params: dict, table: Optional[Sequence[Fraction]] = None,
                 fn: Optional[Callable[[int, Optional[int]], Fraction]] = None):
        self.family = family
        self.params = {k: Fraction(v) for k, v in params.items()}
        self.table = None if table is None else tuple(self._clamp(Fraction(v)) for v in table)
        self.fn = fn
        if family not in {"power", "logpow", "constant", "indexed", "callback"}:
            raise ValueError(f"unknown family {family!r}")
        if family == "constant":
            self.params["c"] = self._clamp(self.params["c"])
        if family in {"power", "logpow"} and self.params["c"] < 0:
            raise ValueError("c must be >= 0")

    @staticmethod
    def _clamp(v: Fraction) -> Fraction:
        return min(Fraction(1), max(Fraction(0), v))

    @classmethod
    def power(cls, c, lam) -> "ApproxFunction":
        return cls("power", {"c": c, "lam": lam})

    @classmethod
    def logpow(cls, c, beta) -> "ApproxFunction":
        return cls("logpow", {"c": c, "beta": beta})

    @classmethod
    def constant(cls, c) -> "ApproxFunction":
        return cls("constant", {"c": c})

    @classmethod
    def indexed(cls, table: Sequence) -> "ApproxFunction":
        return cls("indexed", {}, table=table)

    @classmethod
    def from_callback(cls, fn: Callable[[int, Optional[int]], Fraction]) -> "ApproxFunction":
        return cls("callback", {}, fn=fn)

    def __call__(self, q: int, n: Optional[int] = None) -> Fraction:
        return self.eval(q, n)

    def eval(self, q: int, n: Optional[int] = None) -> Fraction:
        if q < 1:
            raise ValueError("q must be >= 1")
        if self.family == "constant":
            return self.params["c"]
        if self.family == "power":
            c, lam = self.params["c"], self.params["lam"]
            if lam.denominator == 1:
                val = c * Fraction(q) ** (-lam.numerator)
            else:
                val = c * dyadic_power_floor(q, 1, lam)
            return min(Fraction(1, 2), val)
        if self.family == "logpow":
            c, beta = self.params["c"], self.params["beta"]
            log_val = Fraction.from_float(math.log(q + 2))
            if beta.denominator == 1:
                val = c * log_val ** (-beta.numerator)
            else:
                val = c * dyadic_power_floor(log_val.numerator, log_val.denominator, beta)
            return min(Fraction(1, 2), val)
        if self.family == "indexed":
            if n is None or not 1 <= n <= len(self.table):
                raise IndexError(f"indexed family needs 1 <= n <= {len(self.table)}, got {n}")
            return self.table[n - 1]
        return self._clamp(Fraction(self.fn(q, n)))

    def to_json(self) -> str:
        if self.family == "callback":
            raise ValueError("callback family is not serializable")
        doc = {"family": self.family}
        doc.update({k: rational_to_str(v) for k, v in self.params.items()})
        if self.table is not None:
            doc["table"] = [rational_to_str(v) for v in self.table]
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "ApproxFunction":
        doc = json.loads(s)
        family = doc.pop("family")
        table = doc.pop("table", None)
        params = {k: rational_from_str(v) for k, v in doc.items()}
        if family == "indexed":
            return cls.indexed([rational_from_str(v) for v in table])
        return cls(family, params)

    def __repr__(self):
        ps = ", ".join(f"{k}={rational_to_str(v)}" for k, v in self.params.items())
        return f"ApproxFunction({self.family}, {ps})"


def hits_target(x_num: int, precision_bits: int, q: int,
                gamma_num: int, gamma_den: int, psi_num: int, psi_den: int) -> bool:
    """Exact test of ||q*x - gamma|| <= psi on cleared denominators.

    x = x_num / 2**precision_bits, gamma = gamma_num/gamma_den,
    psi = psi_num/psi_den.  Integer arithmetic only.
    """
    big_den = gamma_den << precision_bits
    u = (q * x_num * gamma_den - (gamma_num << precision_bits)) % big_den
    dist_num = min(u, big_den - u)
    return psi_den * dist_num <= psi_num * big_den


def membership(x: DyadicPoint, q: int, gamma: Fraction, psi: ApproxFunction,
               n: Optional[int] = None) -> bool:
    """Whether ||q*x - gamma|| <= psi(q), decided exactly."""
    if q < 1:
        raise ValueError("q must be >= 1")
    gamma = check_unit_interval(gamma)
    p = psi.eval(q, n)
    return hits_target(x.numerator, x.precision_bits, q,
                       gamma.numerator, gamma.denominator, p.numerator, p.denominator)


def eval_psi(psi: ApproxFunction, q: int, n: Optional[int] = None) -> Fraction:
    """Module-level alias for ApproxFunction.eval."""
    return psi.eval(q, n)
