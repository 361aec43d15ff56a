import itertools
import json
import math

import numpy as np
import pytest

from randpoly.measures import (CapacityError,
                               DomainError,
                               FiniteAtomicLaw,
                               LatticeBallLaw,
                               Pmf1D,
                               ProductLaw,
                               TailPolicy,
                               ValidationError,
                               as_atomic,
                               count_lattice_ball,
                               lattice_ball_enumerate,
                               make_bernoulli,
                               make_cube,
                               make_from_masses,
                               make_symmetric_geometric,
                               make_uniform,
                               measure_from_json,
                               merge_atoms,
                               read_measure,
                               validate_log_concave)

def test_bernoulli_masses():
    pmf = make_bernoulli(0.5)
    np.testing.assert_allclose(pmf.masses, [0.5, 0.5])
    assert (pmf.lo, pmf.hi) == (0, 1)
    pmf = make_bernoulli(0.25)
    assert pmf.log_mass(0) == pytest.approx(-math.log(0.75), abs=1e-15)
    assert pmf.log_mass(1) == pytest.approx(-math.log(0.25), abs=1e-15)
    assert math.isinf(pmf.log_mass(2))

def test_bernoulli_second_factor_of_discrete_product():
    p = 1 / (2 * math.log(5) ** 3)
    pmf = make_bernoulli(p)
    assert pmf.masses[1] == pytest.approx(p, rel=1e-14)

@pytest.mark.parametrize('p', [0, 1, -0.1, 1.5])
def test_bernoulli_domain(p):
    with pytest.raises(DomainError):
        make_bernoulli(p)

def test_geometric_ratios():
    pmf = make_symmetric_geometric(0.5)
    assert pmf.symmetric
    r = pmf.ratios()
    k = pmf.ks[:-1]
    np.testing.assert_allclose(r[k >= 0], 0.5, rtol=1e-12)
    assert math.fsum(pmf.masses) == pytest.approx(1.0, abs=1e-12)
    assert pmf.truncated and pmf.tail_mass < 1e-12

def test_geometric_truncation_error_against_closed_tail():
    q = 0.9
    pmf = make_symmetric_geometric(q, TailPolicy(1e-12, 10**4))
    assert pmf.tail_mass < 1e-12
    # both tails of (1 - q)/(1 + q) q^|k| beyond the stored edge
    removed = 2 * q ** (pmf.hi + 1) / (1 + q)
    assert removed < 1e-12
    assert pmf.lo == -pmf.hi

def test_geometric_domain():
    with pytest.raises(DomainError):
        make_symmetric_geometric(1.0)

def test_hard_cap():
    with pytest.raises(CapacityError):
        make_symmetric_geometric(0.999999, TailPolicy(1e-12, 1000))

def test_log_concavity():
    assert validate_log_concave(make_symmetric_geometric(0.5)).is_log_concave
    report = validate_log_concave(make_from_masses([0.2, 0.1, 0.7]))
    assert not report.is_log_concave
    assert report.first_violation == 1
    for p in (0.01, 0.3, 0.5, 0.99):
        assert validate_log_concave(make_bernoulli(p)).is_log_concave

def test_log_concavity_tolerance_is_absolute_on_the_masses():
    # p(1)^2 falls short of p(0) p(2) by delta before normalization
    def law(delta):
        return make_from_masses([0.3, math.sqrt(0.09 - delta), 0.3])
    assert validate_log_concave(law(5e-15)).is_log_concave
    assert validate_log_concave(law(0.0)).is_log_concave
    report = validate_log_concave(law(1e-12))
    assert not report.is_log_concave and report.first_violation == 1

def test_interior_zero_is_rejected():
    with pytest.raises(ValidationError) as info:
        make_from_masses([0.5, 0.0, 0.5], k_min=3)
    assert 'k=4' in str(info.value)
    with pytest.raises(ValidationError):
        make_from_masses([0.0, 0.0])

def test_zero_masses_at_the_ends_are_trimmed():
    pmf = make_from_masses([0.0, 0.25, 0.5, 0.25, 0.0, 0.0], k_min=-2)
    assert (pmf.lo, pmf.hi) == (-1, 1)
    assert pmf.mass(0) == pytest.approx(0.5)
    symmetric = make_from_masses([0.0, 0.3, 0.4, 0.3, 0.0], k_min=-2, symmetric=True)
    assert symmetric.symmetric and symmetric.lo == -1

def test_declared_support_and_mass_sum_are_checked():
    with pytest.raises(ValidationError):
        Pmf1D(0, [0.0, 0.0], k_min=1)
    with pytest.raises(ValidationError):
        FiniteAtomicLaw([[0.0], [1.0]], [0.5, 0.6])

def test_symmetric_flag_is_checked():
    with pytest.raises(ValidationError):
        make_from_masses([0.2, 0.3, 0.5], k_min=-1, symmetric=True)

def test_atomic_law_rejects_repeated_atoms():
    with pytest.raises(ValidationError):
        FiniteAtomicLaw([[0, 0], [0, 0]], [0.5, 0.5])

def test_full_dimensional_flag():
    with pytest.raises(ValidationError):
        FiniteAtomicLaw([[0, 0], [1, 1], [2, 2]], [0.5, 0.25, 0.25], full_dimensional=True)
    law = FiniteAtomicLaw([[0, 0], [1, 0], [0, 1]], [0.5, 0.25, 0.25], full_dimensional=True)
    assert law.mass_of([1, 0]) == 0.25
    assert law.mass_of([1, 1]) == 0.0

def test_lattice_ball_small_cases():
    points = lattice_ball_enumerate(LatticeBallLaw(2, 1, 2))
    assert sorted(map(tuple, points.tolist())) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    assert LatticeBallLaw(3, 1, 1).M == 7
    law = LatticeBallLaw(4, math.sqrt(2), 2)
    assert law.k == 2
    assert law.M == 2 ** 2 * math.comb(4, 2) + 9

def test_lattice_ball_against_brute_force():
    law = LatticeBallLaw(3, 2, 1)
    grid = itertools.product(range(-2, 3), repeat=3)
    expected = sorted(x for x in grid if sum(abs(v) for v in x) <= 2)
    assert [tuple(p) for p in law.points.tolist()] == expected
    assert count_lattice_ball(law) == len(expected)

def test_lattice_ball_symmetric_under_signed_permutations():
    law = LatticeBallLaw(3, 2.5, 2)
    points = set(map(tuple, law.points.tolist()))
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            image = {tuple(s * p[i] for s, i in zip(signs, perm)) for p in points}
            assert image == points

def test_lattice_ball_integer_path_is_exact():
    law = LatticeBallLaw(4, 3, 1)
    assert not law.inexact
    assert np.abs(law.points).sum(axis=1).max() == 3

def test_fractional_exponent_sets_guard_band_flag():
    law = LatticeBallLaw(2, 2, 1.5)
    assert law.inexact
    assert all(abs(a) ** 1.5 + abs(b) ** 1.5 <= 2 ** 1.5 + 1e-9 for a, b in law.points.tolist())

def test_lattice_ball_cap():
    with pytest.raises(CapacityError):
        lattice_ball_enumerate(LatticeBallLaw(12, 3, 1, enumeration_cap=1000))

@pytest.mark.parametrize('n, r, p', [(0, 1, 1), (2, 0.5, 1), (2, 1, 0.5)])
def test_lattice_ball_domain(n, r, p):
    with pytest.raises(DomainError):
        LatticeBallLaw(n, r, p)

def test_product_law():
    law = make_cube(3)
    assert law.n == 3 and law.is_binary() and law.support_size == 8
    assert law.log_mass([1, 0, 1]) == pytest.approx(3 * math.log(2))
    with pytest.raises(ValidationError):
        ProductLaw([])

def test_as_atomic_product():
    law = ProductLaw([make_bernoulli(0.3), make_uniform(-1, 1)])
    atomic = as_atomic(law)
    assert len(atomic) == 6
    assert atomic.mass_of([1, -1]) == pytest.approx(0.3 / 3)

def test_merge_atoms():
    values, probs = merge_atoms([1.0, 0.0, 1.0 + 1e-14], [0.25, 0.5, 0.25])
    np.testing.assert_allclose(values, [0.0, 1.0])
    np.testing.assert_allclose(probs, [0.5, 0.5])

def test_json_revalidates():
    pmf = make_symmetric_geometric(0.5)
    doc = json.loads(json.dumps(pmf.to_json()))
    back = measure_from_json(doc)
    assert (back.lo, back.hi, back.symmetric) == (pmf.lo, pmf.hi, True)
    np.testing.assert_allclose(back.g, pmf.g, rtol=1e-13, atol=1e-13)
    doc['log_mass'][1] = 'inf'
    with pytest.raises(ValidationError):
        measure_from_json(doc)
    cube = measure_from_json(make_cube(4).to_json())
    assert cube.n == 4 and cube.identical
    with pytest.raises(ValidationError):
        measure_from_json({'type': 'simplex'})

def test_read_measure(tmp_path):
    path = tmp_path / 'ball.json'
    path.write_text(json.dumps({'type': 'lattice_ball', 'n': 3, 'r': 1, 'p': 1}))
    assert read_measure(str(path)).M == 7
    path.write_text('{"type": ')
    with pytest.raises(ValidationError):
        read_measure(str(path))
