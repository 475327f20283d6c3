"""Parity-vanishing machinery: antisymmetrized test polynomials, certificates
expressing power moments in terms of them, and the p-adic congruence checks
those certificates justify on four-term-kernel measures.

Polynomials in the single variable x are dense coefficient tuples (index =
power) with exact Fraction entries and no trailing zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Literal, Mapping, Sequence

from .exact import INFINITY, binomial, bernoulli, format_rational, padic_valuation, parse_rational
from .measures import Coset, LevelMeasure, coset_moment, four_term_is_zero, moment
from .series import LambdaTable

__all__ = [
    "Poly",
    "poly_eval",
    "four_term_poly",
    "four_term_poly_coeffs",
    "VanishingCertificate",
    "make_certificate",
    "CongruenceVerdict",
    "vanishing_check",
    "coset_four_term_check",
    "coset_lambda_tables",
    "coefficient_four_term_check",
    "FiltrationReport",
    "filtration_check",
    "depth_one_bernoulli_value",
    "certificate_to_json_dict",
    "certificate_from_json_dict",
]

Poly = tuple[Fraction, ...]

Parity = Literal["even", "odd"]


def _parity_is_odd(m_parity: str) -> bool:
    if m_parity == "even":
        return False
    if m_parity == "odd":
        return True
    raise ValueError(f"parity must be 'even' or 'odd', got {m_parity!r}")


def _trim(coeffs: Sequence[Fraction]) -> Poly:
    end = len(coeffs)
    while end and not coeffs[end - 1]:
        end -= 1
    return tuple(coeffs[:end])


def _poly_add(a: Poly, b: Poly, scale: Fraction = Fraction(1)) -> Poly:
    out = list(a) + [Fraction(0)] * max(0, len(b) - len(a))
    for k, coeff in enumerate(b):
        out[k] += scale * coeff
    return _trim(out)


def _shifted_power(offset: int, q: int) -> Poly:
    """(x + offset)^q expanded."""
    return tuple(Fraction(binomial(q, k) * offset ** (q - k)) for k in range(q + 1))


def _monomial(q: int, coeff: Fraction | int = 1) -> Poly:
    return _trim([Fraction(0)] * q + [Fraction(coeff)])


def poly_eval(poly: Poly, x: Fraction | int) -> Fraction:
    total = Fraction(0)
    for coeff in reversed(poly):
        total = total * x + coeff
    return total


def four_term_poly(q: int, m_parity: Parity) -> Poly:
    """x^q - (-1)^(m+q) x^q + (-1)^(m+q) (x-1)^q - (x+1)^q for the given parity of m.

    This is the one-variable shadow of the signed four-term combination after
    the three affine changes of variables.
    """
    if q < 0:
        raise ValueError("exponent must be non-negative")
    sign = -1 if (_parity_is_odd(m_parity) + q) % 2 else 1
    out = _monomial(q, 1 - sign)
    out = _poly_add(out, _shifted_power(-1, q), Fraction(sign))
    out = _poly_add(out, _shifted_power(1, q), Fraction(-1))
    return out


def four_term_poly_coeffs(a: int, m_parity: Parity) -> Poly:
    """Binomial expansion of :func:`four_term_poly`: the coefficient of x^{a-i}
    is C(a, a-i) ((-1)^{m-(a-i)} - 1) for i = 1..a."""
    if a < 1:
        raise ValueError("expansion requires exponent at least 1")
    m_odd = _parity_is_odd(m_parity)
    coeffs = [Fraction(0)] * a
    for k in range(a):
        sign = -1 if (m_odd + k) % 2 else 1
        coeffs[k] = Fraction(binomial(a, k) * (sign - 1))
    return _trim(coeffs)


@dataclass(frozen=True)
class VanishingCertificate:
    """Exact combination sum_q coeff_q * P_q(x) = x^a for a target exponent word.

    ``target`` is (n_1, ..., n_{r-1}, a); the relevant parity is that of
    m = n_1 + ... + n_{r-1}, and the combination exists exactly when m + a is odd.
    """

    target: tuple[int, ...]
    combination: tuple[tuple[int, Fraction], ...]

    @property
    def final_exponent(self) -> int:
        return self.target[-1]

    @property
    def prefix_sum(self) -> int:
        return sum(self.target[:-1])

    @property
    def m_parity(self) -> Parity:
        return "odd" if self.prefix_sum % 2 else "even"

    def slack(self, p: int) -> int:
        """Worst denominator contribution: max(0, max_q -v_p(coeff_q))."""
        worst = 0
        for _, coeff in self.combination:
            v = padic_valuation(coeff, p)
            if v < 0:
                worst = max(worst, -int(v))
        return worst

    def replay(self) -> Poly:
        """Re-expand the combination; soundness means this equals x^a exactly."""
        out: Poly = ()
        for q, coeff in self.combination:
            out = _poly_add(out, four_term_poly(q, self.m_parity), coeff)
        return out


@lru_cache(maxsize=None)
def _combination(a: int, m_odd: bool) -> tuple[tuple[int, Fraction], ...]:
    if (m_odd + a) % 2 == 0:
        raise ValueError("certificate requires the prefix sum and the target exponent "
                         "to have opposite parity")
    if a == 0:
        return ((2, Fraction(-1, 2)),)
    if a == 1:
        return ((2, Fraction(-1, 4)),)
    q = a + 1
    combo: dict[int, Fraction] = {q: Fraction(-1, 2 * q)}
    for k in range(a - 2, -1, -2):
        # the expansion's x^k coefficient is -2 C(q, k); divide out the leading -2(a+1)
        carried = Fraction(binomial(q, k), q)
        for q2, c2 in _combination(k, m_odd):
            combo[q2] = combo.get(q2, Fraction(0)) - carried * c2
    return tuple(sorted((q2, c2) for q2, c2 in combo.items() if c2))


def make_certificate(exponents: Sequence[int]) -> VanishingCertificate:
    """Certificate for the exponent word (n_1, ..., n_{r-1}, a); m + a must be odd."""
    target = tuple(int(e) for e in exponents)
    if not target:
        raise ValueError("exponent word must be non-empty")
    if any(e < 0 for e in target):
        raise ValueError("exponents must be non-negative")
    a = target[-1]
    m_odd = bool(sum(target[:-1]) % 2)
    return VanishingCertificate(target, _combination(a, m_odd))


def certificate_to_json_dict(cert: VanishingCertificate, p: int) -> dict:
    """JSON form: {"target", "combination", "slack"}; slack is evaluated at p."""
    return {
        "target": list(cert.target),
        "combination": [
            {"q": q, "coeff": format_rational(coeff)} for q, coeff in cert.combination
        ],
        "slack": cert.slack(p),
    }


def certificate_from_json_dict(data: Mapping) -> VanishingCertificate:
    return VanishingCertificate(
        tuple(int(e) for e in data["target"]),
        tuple(sorted((int(entry["q"]), parse_rational(entry["coeff"]))
                     for entry in data["combination"])),
    )


@dataclass(frozen=True)
class CongruenceVerdict:
    valuation: int | float
    threshold: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "valuation": "inf" if self.valuation == INFINITY else int(self.valuation),
            "threshold": self.threshold,
            "pass": self.passed,
        }


def _require_kernel_integer(mu: LevelMeasure) -> None:
    if not four_term_is_zero(mu):
        raise ValueError("measure is not in the four-term kernel")
    if not mu.is_integer_valued():
        raise ValueError("measure must be integer-valued (rescale first)")


def vanishing_check(
    mu: LevelMeasure,
    exponents: Sequence[int],
    validate: bool = True,
) -> CongruenceVerdict:
    """Odd-sum moment congruence for a four-term-kernel integer measure.

    The moment with exponent word (0, n_1, ..., n_r) must have p-adic valuation
    at least n minus the certificate slack for the final exponent.  Callers
    sweeping many exponent words over one measure may pass ``validate=False``
    after checking the kernel and integrality hypotheses themselves.
    """
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != mu.r:
        raise ValueError(f"expected {mu.r} exponents, got {len(exponents)}")
    if sum(exponents) % 2 == 0:
        raise ValueError("the exponent sum must be odd")
    if validate:
        _require_kernel_integer(mu)
    cert = make_certificate(exponents)
    value = moment(mu, (0, *exponents))
    valuation = padic_valuation(value, mu.p)
    threshold = mu.n - cert.slack(mu.p)
    return CongruenceVerdict(valuation, threshold, valuation >= threshold)


def coset_four_term_check(
    mu: LevelMeasure,
    coset: Coset,
    exponents: Sequence[int],
    validate: bool = True,
) -> CongruenceVerdict:
    """Signed four-coset moment identity at the measure's level.

    The four sums run over the cosets based at i, -i, -i+1, i-1 with final
    factors x^{n_r}, x^{n_r}, (x-1)^{n_r}, (x+1)^{n_r} and signs
    +1, (-1)^{m+1}, (-1)^m, -1, where m is the sum of all the exponents.
    """
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != mu.r:
        raise ValueError(f"expected {mu.r} exponents, got {len(exponents)}")
    if any(e < 0 for e in exponents):
        raise ValueError("exponents must be non-negative")
    if validate:
        _require_kernel_integer(mu)
    m_sign = -1 if sum(exponents) % 2 else 1
    stride = mu.p**coset.modulus_exponent
    base = tuple(b % stride for b in coset.base)
    word = (0, *exponents)

    def shifted(base_map, offset: int) -> Fraction:
        shifted_base = tuple(base_map(b) % stride for b in base)
        return coset_moment(mu, Coset(shifted_base, coset.modulus_exponent), word, offset)

    total = (
        shifted(lambda b: b, 0)
        + (-m_sign) * shifted(lambda b: -b, 0)
        + m_sign * shifted(lambda b: 1 - b, -1)
        - shifted(lambda b: b - 1, 1)
    )
    valuation = padic_valuation(total, mu.p)
    return CongruenceVerdict(valuation, mu.n, valuation >= mu.n)


def coset_lambda_tables(
    mu: LevelMeasure,
    exponents: Sequence[int],
    modulus_exponent: int,
) -> tuple[dict, dict, dict, dict]:
    """Factorial-normalized coset-moment tables for the four index patterns
    i, -i, -i+1, i-1 (with the matching shifted final factors), indexed by the
    base tuple.  These are the four summands of the signed coset identity in
    normalized-coefficient form."""
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != mu.r:
        raise ValueError(f"expected {mu.r} exponents, got {len(exponents)}")
    norm = 1
    for e in exponents:
        norm *= factorial(e)
    stride = mu.p**modulus_exponent
    word = (0, *exponents)
    patterns = (
        (lambda b: b, 0),
        (lambda b: -b, 0),
        (lambda b: 1 - b, -1),
        (lambda b: b - 1, 1),
    )
    tables: list[dict] = [{}, {}, {}, {}]
    for base in product(range(stride), repeat=mu.r):
        for table, (base_map, offset) in zip(tables, patterns):
            mapped = tuple(base_map(b) % stride for b in base)
            table[base] = (
                coset_moment(mu, Coset(mapped, modulus_exponent), word, offset) / norm
            )
    return tuple(tables)  # type: ignore[return-value]


def coefficient_four_term_check(
    tables: Sequence[Mapping],
    exponent_sum: int,
    p: int,
    threshold: int,
) -> CongruenceVerdict:
    """Signed combination of the four normalized tables against a valuation bound.

    The combination is t0 + (-1)^{m+1} t1 + (-1)^m t2 - t3 per index, with m the
    exponent sum; the verdict passes when every index clears the threshold.
    """
    t0, t1, t2, t3 = tables
    if not (t0.keys() == t1.keys() == t2.keys() == t3.keys()):
        raise ValueError("the four tables must share one index set")
    m_sign = -1 if exponent_sum % 2 else 1
    worst: int | float = INFINITY
    for idx in t0:
        combo = t0[idx] - m_sign * t1[idx] + m_sign * t2[idx] - t3[idx]
        worst = min(worst, padic_valuation(combo, p))
    return CongruenceVerdict(worst, threshold, worst >= threshold)


@dataclass(frozen=True)
class FiltrationReport:
    """Zero-ness of pure-letter coefficient layers, by (level, depth).

    ``cumulative`` verdicts ask that every recorded depth <= k vanish at a
    level; ``exact`` verdicts ask only about depth == k.  A cumulative verdict
    holding at all recorded levels implies it at each single level.
    """

    levels: tuple[int, ...]
    depths: tuple[int, ...]
    zero_cells: Mapping[tuple[int, int], bool]

    def exact_verdict(self, level: int, k: int) -> bool:
        return all(flag for (lv, depth), flag in self.zero_cells.items()
                   if lv == level and depth == k)

    def cumulative_verdict(self, level: int, k: int) -> bool:
        return all(flag for (lv, depth), flag in self.zero_cells.items()
                   if lv == level and depth <= k)

    def uniform_verdict(self, k: int) -> bool:
        return all(self.cumulative_verdict(level, k) for level in self.levels)

    def to_json_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "depths": list(self.depths),
            "cells": [
                {"level": lv, "depth": depth, "zero": flag}
                for (lv, depth), flag in sorted(self.zero_cells.items())
            ],
        }


def filtration_check(tables: Iterable[LambdaTable], k: int | None = None) -> FiltrationReport:
    """Summarize which supplied coefficient layers vanish, up to depth k."""
    zero_cells: dict[tuple[int, int], bool] = {}
    for table in tables:
        if k is not None and table.r > k:
            continue
        key = (table.n, table.r)
        flag = not table.coeffs
        zero_cells[key] = zero_cells.get(key, True) and flag
    levels = tuple(sorted({lv for lv, _ in zero_cells}))
    depths = tuple(sorted({depth for _, depth in zero_cells}))
    return FiltrationReport(levels, depths, zero_cells)


def depth_one_bernoulli_value(scaling: Fraction | int, n: int) -> Fraction:
    """Closed form -B_{2n} / (2 (2n)!) * (c^{2n} - 1) for the depth-one
    coefficient at letter exponent 2n-1, as a function of the scaling value c.

    At c = 1 the value vanishes for every n.
    """
    if n < 1:
        raise ValueError("index must be at least 1")
    c = Fraction(scaling)
    return -bernoulli(2 * n) / (2 * factorial(2 * n)) * (c ** (2 * n) - 1)
