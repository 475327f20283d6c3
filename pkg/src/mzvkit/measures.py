"""Finite-level measures on (Z/p^n Z)^r with exact rational values.

A measure level is a dense row-major table over residue tuples; polynomial
moments are plain finite sums evaluated at the canonical representatives in
[0, p^n).  The signed four-term combination and the affine reindexing maps
follow the composition convention: the value of the reindexed table at j is
the original table at the mapped index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Mapping, Sequence

from .exact import format_rational, is_prime, parse_rational
from .series import LambdaTable

__all__ = [
    "LevelMeasure",
    "Coset",
    "project",
    "affine_pushforward",
    "four_term",
    "four_term_is_zero",
    "moment",
    "lambda_coefficient",
    "coset_moment",
    "measure_from_lambda_table",
    "lambda_table_from_measure",
    "measure_to_json_dict",
    "measure_from_json_dict",
]


def _cell_count(q: int, r: int) -> int:
    return q**r


def point_to_index(point: Sequence[int], q: int) -> int:
    index = 0
    for coordinate in point:
        index = index * q + coordinate
    return index


def index_to_point(index: int, q: int, r: int) -> tuple[int, ...]:
    coords = []
    for _ in range(r):
        index, low = divmod(index, q)
        coords.append(low)
    return tuple(reversed(coords))


@lru_cache(maxsize=128)
def _points(q: int, r: int) -> tuple[tuple[int, ...], ...]:
    """All residue tuples in row-major order (first coordinate most significant)."""
    return tuple(product(range(q), repeat=r))


@dataclass(frozen=True)
class Coset:
    """Residues congruent to ``base`` mod p^modulus_exponent, coordinate-wise."""

    base: tuple[int, ...]
    modulus_exponent: int

    def __post_init__(self) -> None:
        if self.modulus_exponent < 0:
            raise ValueError("coset modulus exponent must be non-negative")
        object.__setattr__(self, "base", tuple(self.base))


@dataclass(frozen=True)
class LevelMeasure:
    """Dense rational table on (Z/p^n Z)^r, row-major."""

    p: int
    n: int
    r: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"measure base must be prime, got {self.p}")
        if self.n < 0:
            raise ValueError("measure level must be non-negative")
        if self.r < 1:
            raise ValueError("measure depth must be at least 1")
        expected = _cell_count(self.modulus, self.r)
        values = tuple(
            v if type(v) is Fraction else Fraction(v) for v in self.values
        )
        if len(values) != expected:
            raise ValueError(f"expected {expected} cells, got {len(values)}")
        object.__setattr__(self, "values", values)

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @classmethod
    def zero(cls, p: int, n: int, r: int) -> "LevelMeasure":
        return cls(p, n, r, (Fraction(0),) * _cell_count(p**n, r))

    @classmethod
    def constant(cls, p: int, n: int, r: int, value: Fraction | int = 1) -> "LevelMeasure":
        return cls(p, n, r, (Fraction(value),) * _cell_count(p**n, r))

    @classmethod
    def point_mass(cls, p: int, n: int, r: int, point: Sequence[int], mass: Fraction | int = 1) -> "LevelMeasure":
        q = p**n
        cells = [Fraction(0)] * _cell_count(q, r)
        cells[point_to_index(tuple(c % q for c in point), q)] = Fraction(mass)
        return cls(p, n, r, tuple(cells))

    def value(self, point: Sequence[int]) -> Fraction:
        q = self.modulus
        return self.values[point_to_index(tuple(c % q for c in point), q)]

    def points(self) -> tuple[tuple[int, ...], ...]:
        return _points(self.modulus, self.r)

    def is_zero(self) -> bool:
        return not any(self.values)

    def is_integer_valued(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def _shape(self, other: "LevelMeasure") -> None:
        if (self.p, self.n, self.r) != (other.p, other.n, other.r):
            raise ValueError("measures with different base, level, or depth")

    def __add__(self, other: "LevelMeasure") -> "LevelMeasure":
        self._shape(other)
        return LevelMeasure(
            self.p, self.n, self.r, tuple(a + b for a, b in zip(self.values, other.values))
        )

    def __sub__(self, other: "LevelMeasure") -> "LevelMeasure":
        self._shape(other)
        return LevelMeasure(
            self.p, self.n, self.r, tuple(a - b for a, b in zip(self.values, other.values))
        )

    def __neg__(self) -> "LevelMeasure":
        return LevelMeasure(self.p, self.n, self.r, tuple(-a for a in self.values))

    def _scaled(self, scalar: Fraction | int) -> "LevelMeasure":
        scalar = Fraction(scalar)
        return LevelMeasure(self.p, self.n, self.r, tuple(a * scalar for a in self.values))

    def __mul__(self, scalar: Fraction | int) -> "LevelMeasure":
        return self._scaled(scalar)

    __rmul__ = __mul__


def project(mu: LevelMeasure) -> LevelMeasure:
    """Drop one level: the value at a residue tuple is the sum over its fiber."""
    if mu.n == 0:
        raise ValueError("cannot project below level 0")
    q_new = mu.p ** (mu.n - 1)
    cells = [Fraction(0)] * _cell_count(q_new, mu.r)
    for point, value in zip(mu.points(), mu.values):
        if value:
            cells[point_to_index(tuple(c % q_new for c in point), q_new)] += value
    return LevelMeasure(mu.p, mu.n - 1, mu.r, tuple(cells))


def affine_pushforward(mu: LevelMeasure, scale: int, offset: int) -> LevelMeasure:
    """Reindex by x -> scale*x + offset on every coordinate, composition convention.

    The value of the result at j is the value of ``mu`` at scale*j + offset, so
    e.g. (scale, offset) = (1, -1) yields the table j -> mu(j - 1).
    """
    if scale not in (1, -1):
        raise ValueError("scale must be +1 or -1")
    q = mu.modulus
    values = mu.values
    cells = [
        values[point_to_index(tuple((scale * c + offset) % q for c in point), q)]
        for point in mu.points()
    ]
    return LevelMeasure(mu.p, mu.n, mu.r, tuple(cells))


@lru_cache(maxsize=64)
def _four_term_index_maps(q: int, r: int) -> tuple[tuple[int, ...], ...]:
    maps = []
    for scale, offset in ((-1, 0), (-1, 1), (1, -1)):
        maps.append(
            tuple(
                point_to_index(tuple((scale * c + offset) % q for c in point), q)
                for point in _points(q, r)
            )
        )
    return tuple(maps)


def four_term(mu: LevelMeasure) -> LevelMeasure:
    """Signed combination j -> mu(j) - mu(-j) + mu(1-j) - mu(j-1), coordinate-wise."""
    neg, one_minus, minus_one = _four_term_index_maps(mu.modulus, mu.r)
    values = mu.values
    cells = tuple(
        values[i] - values[neg[i]] + values[one_minus[i]] - values[minus_one[i]]
        for i in range(len(values))
    )
    return LevelMeasure(mu.p, mu.n, mu.r, cells)


def four_term_is_zero(mu: LevelMeasure) -> bool:
    """Whether the four-term combination of ``mu`` vanishes in every cell."""
    neg, one_minus, minus_one = _four_term_index_maps(mu.modulus, mu.r)
    values = mu.values
    return all(
        values[i] - values[neg[i]] + values[one_minus[i]] - values[minus_one[i]] == 0
        for i in range(len(values))
    )


def _check_exponents(exponents: Sequence[int], r: int) -> tuple[int, ...]:
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != r + 1:
        raise ValueError(f"exponent word must have length {r + 1}, got {len(exponents)}")
    if any(e < 0 for e in exponents):
        raise ValueError("exponents must be non-negative")
    return exponents


def _integrand_value(xs: Sequence[int], exponents: Sequence[int], final_offset: int = 0) -> int:
    value = (-xs[0]) ** exponents[0]
    for k in range(1, len(xs)):
        value *= (xs[k - 1] - xs[k]) ** exponents[k]
    value *= (xs[-1] + final_offset) ** exponents[-1]
    return value


@lru_cache(maxsize=512)
def _integrand_vector(q: int, r: int, exponents: tuple[int, ...], final_offset: int) -> tuple[int, ...]:
    return tuple(_integrand_value(point, exponents, final_offset) for point in _points(q, r))


def _integer_cells(mu: LevelMeasure) -> tuple[int, ...] | None:
    cached = mu.__dict__.get("_int_cells", False)
    if cached is not False:
        return cached
    if mu.is_integer_valued():
        cells: tuple[int, ...] | None = tuple(v.numerator for v in mu.values)
    else:
        cells = None
    object.__setattr__(mu, "_int_cells", cells)
    return cells


def moment(
    mu: LevelMeasure,
    exponents: Sequence[int],
    lifts: Mapping[int, int] | None = None,
) -> Fraction:
    """Finite sum of the difference-monomial integrand against the table.

    The integrand is (-x_1)^{e_0} (x_1-x_2)^{e_1} ... (x_{r-1}-x_r)^{e_{r-1}} x_r^{e_r},
    evaluated at the canonical representatives in [0, p^n); no factorial
    normalization is applied.  ``lifts`` optionally overrides the integer
    representative chosen for each residue.
    """
    exponents = _check_exponents(exponents, mu.r)
    q = mu.modulus
    if lifts is None:
        integrand = _integrand_vector(q, mu.r, exponents, 0)
    else:
        table = [lifts.get(residue, residue) for residue in range(q)]
        integrand = tuple(
            _integrand_value([table[c] for c in point], exponents) for point in mu.points()
        )
    ints = _integer_cells(mu)
    if ints is not None:
        return Fraction(sum(f * v for f, v in zip(integrand, ints)))
    total = Fraction(0)
    for f, v in zip(integrand, mu.values):
        if f and v:
            total += v * f
    return total


def lambda_coefficient(
    mu: LevelMeasure,
    exponents: Sequence[int],
    lifts: Mapping[int, int] | None = None,
) -> Fraction:
    """The moment normalized by the product of the exponent factorials."""
    exponents = _check_exponents(exponents, mu.r)
    norm = 1
    for e in exponents:
        norm *= factorial(e)
    return moment(mu, exponents, lifts) / norm


def _coset_points(mu: LevelMeasure, coset: Coset) -> list[tuple[int, ...]]:
    if len(coset.base) != mu.r:
        raise ValueError(f"coset base must have depth {mu.r}")
    if coset.modulus_exponent > mu.n:
        raise ValueError("coset modulus exponent above the measure level")
    stride = mu.p**coset.modulus_exponent
    reps = mu.modulus // stride
    axes = [
        [(b % stride) + t * stride for t in range(reps)]
        for b in coset.base
    ]
    return [tuple(point) for point in product(*axes)]


def coset_moment(
    mu: LevelMeasure,
    coset: Coset,
    exponents: Sequence[int],
    final_offset: int = 0,
) -> Fraction:
    """Moment restricted to the points of a coset.

    ``final_offset`` shifts the last plain factor to (x_r + final_offset)^{e_r};
    the default 0 is the unrestricted-integrand contract, the shifted variants
    feed the signed coset identity check.
    """
    exponents = _check_exponents(exponents, mu.r)
    total = Fraction(0)
    for point in _coset_points(mu, coset):
        value = mu.value(point)
        if value:
            total += value * _integrand_value(point, exponents, final_offset)
    return total


def measure_from_lambda_table(table: LambdaTable) -> LevelMeasure:
    """Dense measure view of a coefficient table (same index space)."""
    q = table.modulus
    cells = [Fraction(0)] * _cell_count(q, table.r)
    for idx, coeff in table.coeffs.items():
        cells[point_to_index(idx, q)] = coeff
    return LevelMeasure(table.p, table.n, table.r, tuple(cells))


def lambda_table_from_measure(mu: LevelMeasure) -> LambdaTable:
    """Coefficient-table view of a measure (zeros dropped)."""
    coeffs = {
        point: value for point, value in zip(mu.points(), mu.values) if value
    }
    return LambdaTable(mu.p, mu.n, mu.r, coeffs)


def measure_to_json_dict(mu: LevelMeasure) -> dict:
    """JSON form: {"p", "n", "r", "values": [row-major rationals]}."""
    return {
        "p": mu.p,
        "n": mu.n,
        "r": mu.r,
        "values": [format_rational(v) for v in mu.values],
    }


def measure_from_json_dict(data: Mapping) -> LevelMeasure:
    return LevelMeasure(
        int(data["p"]),
        int(data["n"]),
        int(data["r"]),
        tuple(parse_rational(v) for v in data["values"]),
    )
