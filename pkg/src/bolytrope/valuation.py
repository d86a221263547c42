"""Rationals with a p-adic valuation.

The field is Q with the p-adic valuation, the valuation ring is Z localized
at p, and the uniformizer is p itself.  Scalars are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

INF = math.inf

ScalarLike = Union[int, str, Fraction]


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (fine for n < 2**31)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def as_scalar(x: ScalarLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"not an exact scalar: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        num, _, den = x.strip().partition("/")
        if den and int(den) == 0:
            raise ValueError(f"zero denominator in scalar {x!r}")
        return Fraction(x.strip())
    raise TypeError(f"not an exact scalar: {x!r}")


def scalar_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def int_valuation(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdicContext:
    """Fixes the prime p: valuation, residue field F_p and uniformizer p."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p!r}")

    def valuation(self, x: ScalarLike):
        x = as_scalar(x)
        if x == 0:
            return INF
        return int_valuation(x.numerator, self.p) - int_valuation(x.denominator, self.p)

    def residue(self, x: ScalarLike) -> int:
        return self.canonical_mod(x, 1)

    def canonical_mod(self, x: ScalarLike, k: int) -> int:
        """The integer in [0, p**k) congruent to x modulo p**k Z_(p)."""
        x = as_scalar(x)
        if k < 0:
            raise ValueError("k must be nonnegative")
        if self.valuation(x) < 0:
            raise ValueError(f"{x} has negative valuation at p={self.p}")
        q = self.p ** k
        if q == 1:
            return 0
        return x.numerator * pow(x.denominator, -1, q) % q

    def unit_part(self, x: Fraction) -> Fraction:
        """x / p**v(x)."""
        v = self.valuation(x)
        return x / Fraction(self.p) ** v


def valuation(ctx: PAdicContext, x: ScalarLike):
    return ctx.valuation(x)


def residue(ctx: PAdicContext, x: ScalarLike) -> int:
    return ctx.residue(x)


def canonical_mod(ctx: PAdicContext, x: ScalarLike, k: int) -> int:
    return ctx.canonical_mod(x, k)
