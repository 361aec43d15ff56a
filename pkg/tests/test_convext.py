import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import linprog
from scipy.stats import entropy

from randpoly.convext import (ExtensionError,
                              extend_1d,
                              get_extension,
                              integral_extension_1d,
                              moment_finiteness_probe,
                              product_extension_eval,
                              restriction_construct)
from randpoly.measures import (DomainError,
                               FiniteAtomicLaw,
                               ProductLaw,
                               make_bernoulli,
                               make_cube,
                               make_from_masses,
                               make_symmetric_geometric,
                               make_uniform)

def test_extension_interpolates():
    pmf = make_symmetric_geometric(0.5)
    ext = extend_1d(pmf)
    np.testing.assert_allclose(ext(pmf.ks), pmf.g)
    assert ext(0.5) == pytest.approx((pmf.g[pmf.ks == 0][0] + pmf.g[pmf.ks == 1][0]) / 2)
    assert math.isinf(ext(pmf.hi + 0.5))
    assert ext.f(0.0) == pytest.approx(pmf.mass(0))

def test_extension_refuses_non_log_concave():
    with pytest.raises(ExtensionError) as info:
        extend_1d(make_from_masses([0.2, 0.1, 0.7]))
    assert info.value.witness == 1
    assert isinstance(info.value, ValueError)

@pytest.mark.parametrize('eps', [0.01, 0.1, 0.2])
def test_integral_three_atom_law(eps):
    pmf = make_from_masses([eps, 1 - 2 * eps, eps], k_min=-1, symmetric=True)
    report = integral_extension_1d(extend_1d(pmf))
    expected = 2 * (1 - 3 * eps) / math.log((1 - 2 * eps) / eps)
    assert report.value == pytest.approx(expected, rel=1e-12)
    assert len(report.pieces) == 2

def test_integral_matches_quadrature():
    for pmf in (make_bernoulli(0.3), make_symmetric_geometric(0.7), make_uniform(-2, 3)):
        ext = get_extension(pmf)
        numeric = sum(quad(ext.f, k, k + 1, epsabs=1e-14, epsrel=1e-12)[0] for k in range(pmf.lo, pmf.hi))
        assert integral_extension_1d(ext).value == pytest.approx(numeric, rel=1e-9)
    bernoulli = get_extension(make_bernoulli(0.3))
    assert integral_extension_1d(bernoulli).value == pytest.approx(0.4 / math.log(7 / 3), rel=1e-12)

def test_integral_of_a_point_mass_is_zero():
    assert integral_extension_1d(extend_1d(make_uniform(0, 0))).value == 0.0

def test_product_extension():
    law = make_cube(2)
    assert product_extension_eval(law, [0.5, 0.5]) == pytest.approx(2 * math.log(2))
    assert math.isinf(product_extension_eval(law, [0.5, 1.5]))
    with pytest.raises(DomainError):
        product_extension_eval(law, [0.5])
    with pytest.raises(ExtensionError):
        product_extension_eval(FiniteAtomicLaw([[0.0], [1.0]], [0.5, 0.5]), [0.5])

def test_restriction_of_laplace_density():
    law = restriction_construct(lambda x: math.exp(-abs(x[0])), 1, (-5, 5), tail_certificate=1e-13)
    assert isinstance(law, ProductLaw)
    pmf = law.factors[0]
    assert pmf.symmetric and (pmf.lo, pmf.hi) == (-5, 5)
    np.testing.assert_allclose(pmf.ratios()[5:], math.exp(-1), rtol=1e-12)
    assert pmf.tail_mass == 1e-13

def test_restriction_in_the_plane():
    law = restriction_construct(lambda x: 1.0, 2, [[0, 1], [0, 2]])
    assert isinstance(law, FiniteAtomicLaw)
    assert len(law) == 6
    np.testing.assert_allclose(law.probs, 1 / 6)

def test_restriction_rejects():
    with pytest.raises(ExtensionError):
        restriction_construct(lambda x: 1.0, 1, (0, 3), tail_certificate=1e-12)
    with pytest.raises(ExtensionError):
        restriction_construct(lambda x: x[0] ** 2 + 0.1, 1, (-3, 3))
    with pytest.raises(DomainError):
        restriction_construct(lambda x: 1.0, 2, [[0, 1]] * 3)

def test_moment_probe_sums_entropy():
    pmf = make_symmetric_geometric(0.5)
    probe = moment_finiteness_probe(pmf, q=1.0)
    radii = [r for r, _ in probe.rows]
    sums = [s for _, s in probe.rows]
    assert radii == [10, 20, 50, 100, 200]
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    # every atom lies within radius 50, so the last sums are the entropy
    assert sums[-1] == pytest.approx(entropy(pmf.masses), rel=1e-12)
    assert probe.B == pytest.approx(math.log(2), rel=1e-6)
    assert probe.certified
    assert 0 <= probe.tail_bound < 1e-20

def test_moment_probe_on_a_product():
    law = ProductLaw([make_symmetric_geometric(0.5)] * 2)
    probe = moment_finiteness_probe(law, q=2.0, radii=(5, 10, 40))
    assert probe.rows[-1][1] > probe.rows[0][1] > 0
    with pytest.raises(DomainError):
        moment_finiteness_probe(law, q=0.5)

def sup_of_affine_minorants(points, g, x):
    """max a.x + b over the affine functions below g at every support point."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    res = linprog(-np.append(x, 1.0), A_ub=np.hstack([points, np.ones((len(points), 1))]), b_ub=g,
                  bounds=[(None, None)] * (d + 1), method='highs')
    assert res.status == 0
    return -res.fun

@pytest.mark.parametrize('pmf', [make_from_masses([0.05, 0.2, 0.5, 0.2, 0.05], k_min=-2),
                                 make_bernoulli(0.3),
                                 make_uniform(-1, 2),
                                 make_from_masses([0.4, 0.3, 0.2, 0.1])])
def test_extension_is_the_supremum_of_affine_minorants(pmf):
    ext = get_extension(pmf)
    for x in np.linspace(pmf.lo, pmf.hi, 23):
        expected = sup_of_affine_minorants(pmf.ks[:, None], pmf.g, [x])
        assert ext(x) == pytest.approx(expected, abs=1e-6)

def test_product_extension_is_the_supremum_in_the_plane():
    law = ProductLaw([make_from_masses([0.2, 0.5, 0.3]), make_bernoulli(0.25)])
    points = np.array([[a, b] for a in law.factors[0].ks for b in law.factors[1].ks], dtype=float)
    g = law.log_mass(points)
    rng = np.random.default_rng(3)
    for x in rng.uniform([0, 0], [2, 1], size=(15, 2)):
        expected = sup_of_affine_minorants(points, g, x)
        assert product_extension_eval(law, x) == pytest.approx(expected, abs=1e-6)
