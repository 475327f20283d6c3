from fractions import Fraction
from itertools import product
from math import gcd

import pytest

from mzvkit.measures import LevelMeasure, affine_pushforward, four_term_is_zero, project
from mzvkit.synth import (
    KernelBasis,
    four_term_kernel,
    four_term_matrix,
    lift,
    random_kernel_measure,
    random_lambda_table,
)

KNOWN_DIMENSIONS = {
    (2, 1, 1): 2,
    (2, 1, 2): 4,
    (3, 1, 1): 2,
    (3, 1, 2): 6,
    (5, 1, 1): 3,
    (5, 1, 2): 15,
    (2, 2, 1): 3,
    (2, 2, 2): 11,
    (3, 2, 1): 5,
    (3, 2, 2): 45,
    (5, 2, 1): 13,
    (5, 2, 2): 325,
}

SMALL_CONFIGS = [(2, 1, 1), (2, 1, 2), (3, 1, 1), (3, 1, 2), (2, 2, 1), (5, 1, 1)]


def orbit_count_oracle(q, r):
    """Kernel dimension by orbit counting.

    The operator factors through negation and the diagonal translation, so its
    kernel dimension is the number of negation orbits on the point set plus the
    number of unordered pairs of diagonal-translation orbits swapped by
    negation.
    """
    points = list(product(range(q), repeat=r))
    negation = lambda pt: tuple(-c % q for c in pt)
    negation_orbits = {frozenset((pt, negation(pt))) for pt in points}

    def translation_orbit(pt):
        return min(tuple((c + t) % q for c in pt) for t in range(q))

    orbits = {translation_orbit(pt) for pt in points}
    swapped_pairs = {
        frozenset((key, translation_orbit(negation(key))))
        for key in orbits
        if translation_orbit(negation(key)) != key
    }
    return len(negation_orbits) + len(swapped_pairs)


def dense_rank(rows):
    rows = [list(row) for row in rows]
    if not rows:
        return 0
    rank = 0
    for col in range(len(rows[0])):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        lead = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                factor = rows[i][col] / lead
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def dense_operator(p, n, r):
    size = (p**n) ** r
    rows = []
    for sparse in four_term_matrix(p, n, r):
        row = [Fraction(0)] * size
        for col, entry in sparse.items():
            row[col] = Fraction(entry)
        rows.append(row)
    return rows


@pytest.mark.parametrize("config", sorted(KNOWN_DIMENSIONS))
def test_kernel_dimension_matches_known_values(config):
    assert four_term_kernel(*config).dimension == KNOWN_DIMENSIONS[config]


@pytest.mark.parametrize("config", sorted(KNOWN_DIMENSIONS))
def test_kernel_dimension_matches_orbit_oracle(config):
    p, n, r = config
    assert four_term_kernel(p, n, r).dimension == orbit_count_oracle(p**n, r)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_mod_two_operator_is_zero(r):
    # negation and the shift by one coincide mod 2, so every row cancels
    assert all(not row for row in four_term_matrix(2, 1, r))
    assert four_term_kernel(2, 1, r).dimension == 2**r


def test_matrix_rows_mod_three():
    assert four_term_matrix(3, 1, 1) == [
        {1: 1, 2: -1},
        {1: 1, 2: -1},
        {1: -2, 2: 2},
    ]


@pytest.mark.parametrize("config", SMALL_CONFIGS)
def test_kernel_against_dense_elimination(config):
    p, n, r = config
    size = (p**n) ** r
    basis = four_term_kernel(p, n, r)
    assert basis.dimension == size - dense_rank(dense_operator(p, n, r))
    assert dense_rank([v.values for v in basis.vectors]) == basis.dimension


@pytest.mark.parametrize("config", sorted(KNOWN_DIMENSIONS))
def test_basis_vectors_are_kernel_and_primitive(config):
    basis = four_term_kernel(*config)
    for vector in basis.vectors:
        assert four_term_is_zero(vector)
        assert vector.is_integer_valued()
        entries = [v.numerator for v in vector.values]
        content = 0
        for entry in entries:
            content = gcd(content, entry)
        assert content == 1
        assert next(entry for entry in entries if entry) > 0


def test_kernel_result_is_cached_and_typed():
    first = four_term_kernel(3, 1, 2)
    assert first is four_term_kernel(3, 1, 2)
    assert isinstance(first, KernelBasis)
    assert (first.p, first.n, first.r) == (3, 1, 2)


def test_cell_cap_rejects_oversized_configs():
    with pytest.raises(ValueError):
        four_term_kernel(5, 2, 2, cell_cap=100)


def test_random_kernel_measure_is_deterministic():
    a = random_kernel_measure(3, 1, 2, seed=7)
    assert a == random_kernel_measure(3, 1, 2, seed=7)
    assert any(
        random_kernel_measure(3, 1, 2, seed=s) != a for s in range(1, 6)
    )


def test_random_kernel_measure_lands_in_kernel():
    for seed in range(10):
        mu = random_kernel_measure(3, 2, 1, seed=seed)
        assert four_term_is_zero(mu)
        assert mu.is_integer_valued()


def test_random_kernel_measure_zero_magnitude():
    assert random_kernel_measure(3, 1, 1, seed=4, magnitude=0).is_zero()


def test_random_lambda_table_is_bounded():
    # the table stores nonzero coefficients only, so zero draws leave holes
    table = random_lambda_table(3, 1, 2, seed=2, magnitude=5)
    assert set(table.coeffs) <= set(product(range(3), repeat=2))
    assert all(c and abs(c) <= 5 for c in table.coeffs.values())
    assert table == random_lambda_table(3, 1, 2, seed=2, magnitude=5)


def test_lift_splits_mass_evenly():
    lifted = lift(LevelMeasure.point_mass(2, 1, 1, (0,)))
    assert (lifted.p, lifted.n) == (2, 2)
    assert lifted.value((0,)) == Fraction(1, 2)
    assert lifted.value((2,)) == Fraction(1, 2)
    assert lifted.value((1,)) == 0
    assert lifted.value((3,)) == 0


def test_lift_zero_is_zero():
    assert lift(LevelMeasure.zero(3, 1, 2)).is_zero()


def test_project_undoes_lift():
    for seed in range(5):
        mu = random_kernel_measure(3, 1, 2, seed=seed)
        assert project(lift(mu)) == mu
    dense = LevelMeasure(2, 1, 1, (Fraction(3), Fraction(-7)))
    assert project(lift(dense)) == dense


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("r", [1, 2])
def test_lift_preserves_kernel_membership(p, r):
    for vector in four_term_kernel(p, 1, r).vectors:
        assert four_term_is_zero(lift(vector))


@pytest.mark.parametrize("config", SMALL_CONFIGS)
def test_kernel_invariant_under_negation(config):
    # the operator anti-commutes with the negation pushforward
    for vector in four_term_kernel(*config).vectors:
        assert four_term_is_zero(affine_pushforward(vector, -1, 0))
