import itertools
import math

import numpy as np
import pytest

from randpoly.geometry import hull_membership
from randpoly.lattice import (cross_polytope_capture_curve,
                              cross_polytope_exact_mass,
                              decompose_ball,
                              distinct_fraction,
                              facet_bound,
                              facet_set,
                              layer_size,
                              sandwich_bounds)
from randpoly.measures import DomainError, LatticeBallLaw

def test_layer_and_facet_sizes():
    assert layer_size(4, 2) == 24
    assert layer_size(10, 1) == 20
    assert facet_bound(1) == 1
    assert facet_bound(2) == 3
    assert facet_bound(3) == 10

def test_cross_polytope_decomposition():
    d = decompose_ball(LatticeBallLaw(3, 1, 1))
    assert (d.M_n, d.A_n_size, d.residual_size, d.R_k) == (7, 6, 1, 1)
    assert d.C_n == pytest.approx(1 / 7)

def test_closed_form_in_high_dimension():
    d = decompose_ball(LatticeBallLaw(10**6, 1, 1))
    assert d.M_n == 2 * 10**6 + 1
    assert d.C_n == pytest.approx(1 / (2 * 10**6 + 1))
    with pytest.raises(DomainError):
        decompose_ball(LatticeBallLaw(4, 2, 1), formula_only=True)

def test_euclidean_decomposition():
    d = decompose_ball(LatticeBallLaw(4, math.sqrt(2), 2))
    assert (d.M_n, d.A_n_size, d.residual_size) == (33, 24, 9)
    assert d.C_n == pytest.approx(9 / 33)

@pytest.mark.parametrize('law, x', [
    (LatticeBallLaw(4, 2, 1), [1, -1, 0, 0]),
    (LatticeBallLaw(4, math.sqrt(2), 2), [0, 1, 0, -1]),
    (LatticeBallLaw(5, 3, 1), [1, 0, -1, 0, 1]),
])
def test_facet_set_against_brute_force(law, x):
    facets = facet_set(x, law)
    points = law.points
    expected = points[points @ np.asarray(x) == law.k]
    assert sorted(map(tuple, facets.tolist())) == sorted(map(tuple, expected.tolist()))
    assert len(facets) <= facet_bound(law.k)

def test_facet_set_is_full_for_the_l1_ball():
    law = LatticeBallLaw(5, 3, 1)
    assert len(facet_set([1, 1, 1, 0, 0], law)) == facet_bound(3)

def test_facet_set_rejects_vectors_off_the_layer():
    law = LatticeBallLaw(4, 2, 1)
    for x in ([1, 1, 1, 0], [2, 0, 0, 0], [1, 0, 0]):
        with pytest.raises(DomainError):
            facet_set(x, law)

def test_distinct_fraction():
    assert distinct_fraction(5, 0) == 0.0
    assert distinct_fraction(1, 7) == 1.0
    assert distinct_fraction(5, 2) == pytest.approx(0.36)

def test_sandwich_is_ordered():
    law = LatticeBallLaw(10, 1, 1)
    d = decompose_ball(law)
    previous = 0.0
    for N in (0, 1, 5, 21, 100, 400):
        b = sandwich_bounds(law, N, d)
        assert 0 <= b.lower <= b.upper <= b.upper_loose <= 1
        assert b.lower >= previous
        previous = b.lower
    b = sandwich_bounds(law, 5, d)
    assert b.C_n == pytest.approx(1 / 21)
    assert b.P_bound_loose == pytest.approx(10 / 21 ** 2)
    assert b.P_bound == pytest.approx(10 / 21 ** 2 * 20 / 21)

def test_capture_curve_by_hand():
    law = LatticeBallLaw(2, 1, 1)
    samples = [[1, 0], [-1, 0], [0, 1], [0, 1]]
    curve = cross_polytope_capture_curve(samples, law, [0, 1, 2, 3, 4])
    np.testing.assert_allclose(curve, [0, 1 / 5, 3 / 5, 4 / 5, 4 / 5])
    assert cross_polytope_exact_mass([[0, 0]]) == pytest.approx(1 / 5)

def test_capture_against_hull_membership():
    law = LatticeBallLaw(3, 1, 1)
    rng = np.random.default_rng(11)
    points = law.points
    for _ in range(20):
        samples = points[rng.integers(len(points), size=rng.integers(1, 7))]
        inside = sum(hull_membership(y, samples).status == 'inside' for y in points)
        assert cross_polytope_exact_mass(samples, law) == pytest.approx(inside / len(points))

def test_capture_rejects_other_points():
    law = LatticeBallLaw(2, 1, 1)
    with pytest.raises(DomainError):
        cross_polytope_capture_curve([[1, 1]], law, [1])
    with pytest.raises(DomainError):
        cross_polytope_capture_curve([[1, 0]], law, [2])
    with pytest.raises(DomainError):
        cross_polytope_capture_curve([[1, 0]], LatticeBallLaw(2, 2, 1), [1])

@pytest.mark.parametrize('n', [3, 6, 9, 12])
@pytest.mark.parametrize('k', [1, 2, 3])
def test_decomposition_against_enumeration(n, k):
    law = LatticeBallLaw(n, k, 1)
    d = decompose_ball(law)
    points = law.points
    nonzeros = np.count_nonzero(points, axis=1)
    assert d.M_n == len(points)
    assert d.A_n_size == 2 ** k * math.comb(n, k) == np.sum(nonzeros == k)
    assert d.residual_size == np.sum(nonzeros <= k - 1) == d.M_n - d.A_n_size
    assert np.all(np.abs(points[nonzeros == k]).sum(axis=1) == k)

@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_facet_set_size_on_the_l1_ball(k):
    law = LatticeBallLaw(k + 2, k, 1)
    x = [1] * k + [0, 0]
    facets = facet_set(x, law)
    points = law.points
    assert len(facets) == np.sum(points @ np.asarray(x) == k) == math.comb(2 * k - 1, k)

@pytest.mark.parametrize('n, r', [(3, 2), (4, 2), (3, 3)])
def test_captured_layer_points_need_their_facet(n, r):
    law = LatticeBallLaw(n, r, 1)
    atoms = law.to_atomic().points
    layer = [np.array(v) for v in itertools.product((-1, 0, 1), repeat=n) if np.count_nonzero(v) == law.k]
    facets = [set(map(tuple, facet_set(x, law))) for x in layer]
    rng = np.random.default_rng(n * 10 + r)
    captured_from_outside = 0
    for _ in range(100):
        B = atoms[rng.choice(len(atoms), size=rng.integers(4, 20), replace=False)]
        rows = set(map(tuple, B))
        for x, facet in zip(layer, facets):
            if hull_membership(x, B).status != 'inside':
                continue
            hits = len(rows & facet)
            if tuple(x) in rows:
                assert hits >= 1
            else:
                assert hits >= 2
                captured_from_outside += 1
    assert captured_from_outside > 0
