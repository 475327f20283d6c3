"""Exact scalar arithmetic: p-adic valuations, Bernoulli numbers, binomials.

Every quantity in this package is a ``fractions.Fraction`` or an int; nothing
here ever rounds.  The only non-rational value is the valuation of zero,
reported as ``INFINITY`` so that threshold comparisons work unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, inf, isqrt

__all__ = [
    "INFINITY",
    "is_prime",
    "padic_valuation",
    "bernoulli",
    "binomial",
    "format_rational",
    "parse_rational",
]

INFINITY = inf


def is_prime(p: int) -> bool:
    """Trial-division primality test; adequate for the single-digit primes used here."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for d in range(3, isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


def _int_valuation(k: int, p: int) -> int:
    # k must be nonzero
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def padic_valuation(q: Fraction | int, p: int) -> int | float:
    """p-adic valuation of a rational, with ``INFINITY`` for zero.

    Raises ValueError when p is not prime.
    """
    if not is_prime(p):
        raise ValueError(f"valuation base must be prime, got {p}")
    q = Fraction(q)
    if q == 0:
        return INFINITY
    return _int_valuation(q.numerator, p) - _int_valuation(q.denominator, p)


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """k-th Bernoulli number in the B_1 = -1/2 convention.

    Computed by the Akiyama-Tanigawa triangle, which natively yields the
    B_1 = +1/2 convention; the two conventions differ only at index 1.
    """
    if k < 0:
        raise ValueError("Bernoulli index must be non-negative")
    if k == 1:
        return Fraction(-1, 2)
    row: list[Fraction] = []
    for m in range(k + 1):
        row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
    return row[0]


def binomial(a: int, b: int) -> int:
    """C(a, b) with the convention that out-of-range b gives 0."""
    if a < 0:
        raise ValueError("binomial row index must be non-negative")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


def format_rational(q: Fraction | int) -> str:
    """Canonical string form: lowest terms, positive denominator, "n" or "n/d"."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`format_rational`; accepts any "n" or "n/d" string."""
    return Fraction(text.strip())
