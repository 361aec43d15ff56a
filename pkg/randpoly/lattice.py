"""Lattice p-ball combinatorics: layer decomposition, facet sets and the
coupon-collector sandwich."""

import itertools
import math
from typing import NamedTuple

import numpy as np
from scipy.special import comb

from . import log
from .action import Action, register_action
from .measures import (DomainError,
                       InvariantError,
                       LatticeBallLaw)
from .options import FloatOption, IntListOption, IntOption

module_logger = log.get_module_logger(__file__)

class BallDecomposition(NamedTuple):
    law: LatticeBallLaw
    M_n: int
    A_n_size: int
    residual_size: int
    C_n: float
    R_k: int

def layer_size(n, k):
    """|A_n| = 2^k C(n, k)."""
    return 2 ** k * math.comb(n, k)

def facet_bound(k):
    """R_k = C(2k - 1, k)."""
    return math.comb(2 * k - 1, k)

def decompose_ball(law, formula_only=None):
    """Split L_n into the layer A_n ({-1,0,1} vectors with k nonzeros) and the
    residual, which may only hold vectors with at most k - 1 nonzeros.

    For k = 1 the closed form M_n = 2n + 1 is used without enumerating when
    formula_only is true (the default for n > 10^5).
    """
    k = law.k
    A = layer_size(law.n, k)
    if formula_only is None:
        formula_only = law.is_cross_polytope and law.n > 10**5
    if formula_only:
        if not law.is_cross_polytope:
            raise DomainError('law', law, "closed form decomposition needs k = 1")
        M = 2 * law.n + 1
    else:
        points = law.points
        M = len(points)
        nonzero = np.count_nonzero(points, axis=1)
        unit = np.all(np.abs(points) <= 1, axis=1)
        in_layer = unit & (nonzero == k)
        if int(in_layer.sum()) != A:
            raise InvariantError("layer has %d points, expected 2^k C(n,k) = %d" % (in_layer.sum(), A))
        if np.any(nonzero[~in_layer] > k - 1):
            raise InvariantError("residual point with k or more nonzero coordinates")
    residual = M - A
    return BallDecomposition(law, M, A, residual, residual / M, facet_bound(k))

def _check_layer_vector(x, law):
    x = np.asarray(x)
    if x.shape != (law.n,) or not np.all(np.isin(x, (-1, 0, 1))) or np.count_nonzero(x) != law.k:
        raise DomainError('x', x.tolist(), "not a {-1,0,1} vector with exactly k=%d nonzeros" % law.k)
    return x.astype(np.int64)

def facet_set(x, law):
    """F_x = {y in L_n : <x, y> = k} for x in the layer A_n.

    Enumerated for the canonical x = (1,...,1,0,...,0) as nonnegative
    k-tuples summing to k (stars and bars), mapped back through the signed
    permutation taking the canonical vector to x. Tuples leaving the ball
    (possible for p > 1) are dropped, so |F_x| <= C(2k - 1, k) with equality
    for p = 1.
    """
    x = _check_layer_vector(x, law)
    k = law.k
    support = np.nonzero(x)[0]
    signs = x[support]
    out = []
    for bars in itertools.combinations(range(2 * k - 1), k - 1):
        edges = (-1,) + bars + (2 * k - 1,)
        parts = [edges[i + 1] - edges[i] - 1 for i in range(k)]
        y = np.zeros(law.n, dtype=np.int64)
        y[support] = signs * np.array(parts, dtype=np.int64)
        if law.contains(y):
            out.append(y)
    out.sort(key=tuple)
    return np.array(out, dtype=np.int64).reshape(-1, law.n)

class SandwichBounds(NamedTuple):
    lower: float
    upper: float
    upper_loose: float
    C_n: float
    P_bound: float
    P_bound_loose: float

def distinct_fraction(M, N):
    """1 - (1 - 1/M)^N, the expected fraction of distinct draws."""
    if N <= 0:
        return 0.0
    if M == 1:
        return 1.0
    return -math.expm1(N * math.log1p(-1.0 / M))

def sandwich_bounds(law, N, decomposition=None):
    """Coupon-collector sandwich around F_{n,N} for the uniform lattice ball.

    P_bound uses the per point constant C(N,2)(R_k/M)^2 weighted by the
    layer fraction A/M; P_bound_loose replaces that fraction by 1.
    """
    d = decomposition or decompose_ball(law)
    lower = distinct_fraction(d.M_n, N)
    pairs = comb(N, 2, exact=True) if N >= 2 else 0
    per_point = pairs * (d.R_k / d.M_n) ** 2
    P = per_point * d.A_n_size / d.M_n
    clamp = lambda v: min(max(v, 0.0), 1.0)
    return SandwichBounds(clamp(lower), clamp(lower + d.C_n + P), clamp(lower + d.C_n + per_point),
                          d.C_n, P, per_point)

def _cross_polytope_codes(samples, n):
    """Atom code per sample: 0 for the origin, i+1 for e_i, -(i+1) for -e_i."""
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[1] != n:
        raise DomainError('samples', samples.shape, "expected rows of length %d" % n)
    nonzero = np.count_nonzero(samples, axis=1)
    if np.any(nonzero > 1) or np.any(np.abs(samples).sum(axis=1) > 1):
        raise DomainError('samples', 'points', "not supported on {0, +-e_i}")
    idx = np.argmax(np.abs(samples), axis=1)
    sign = samples[np.arange(len(samples)), idx]
    return np.where(nonzero == 0, 0, sign * (idx + 1)).astype(np.int64)

def cross_polytope_capture_curve(samples, law, Ns):
    """|K_N intersected with L_n| / M_n for every prefix length N in Ns.

    +-e_i is captured iff it was drawn; the origin iff it was drawn or both
    e_i and -e_i were drawn for some i.
    """
    if not law.is_cross_polytope:
        raise DomainError('law', law, "exact mass needs the r = 1 lattice ball")
    n = law.n
    M = 2 * n + 1
    codes = _cross_polytope_codes(samples, n)
    length = len(codes)
    first = np.full(2 * n + 1, length, dtype=np.int64)
    # first[c + n] is the first draw index of code c.
    np.minimum.at(first, codes + n, np.arange(length))
    vertex_first = np.delete(first, n)
    pair_time = np.maximum(first[n + 1:], first[:n][::-1])
    origin_time = min(first[n], int(pair_time.min()) if n else length)
    times = np.sort(np.append(vertex_first, origin_time))
    Ns = np.asarray(Ns, dtype=np.int64)
    if np.any(Ns > length):
        raise DomainError('N', int(Ns.max()), "more than the %d samples given" % length)
    captured = np.searchsorted(times, Ns, side='left')
    return captured / M

def cross_polytope_exact_mass(samples, law=None):
    samples = np.atleast_2d(np.asarray(samples))
    if law is None:
        law = LatticeBallLaw(samples.shape[1], 1, 1)
    return float(cross_polytope_capture_curve(samples, law, [len(samples)])[0])

class LatticeThresholdAction(Action):
    action_name = 'lattice-threshold'
    tooltip = 'Coupon-collector sandwich and Monte Carlo captured mass for the uniform lattice ball.'

    def get_options(self):
        return [IntOption('n', minimum=1, required=True, tooltip='Dimension.'),
                FloatOption('r', minimum=1, default=1.0, tooltip='Radius, at least 1.'),
                FloatOption('p', minimum=1, default=1.0, tooltip='Exponent of the l_p ball, at least 1.'),
                IntListOption('N', minimum=0, required=True, tooltip='Comma separated sample counts.'),
                IntOption('trials', minimum=0, default=2000, tooltip='Monte Carlo trials (0 for bounds only).')]

    def run(self):
        from .simulate import ExperimentConfig, estimate_F
        self.ensure_seed()
        law = LatticeBallLaw(self.params['n'], self.params['r'], self.params['p'])
        Ns = sorted(self.params['N'])
        d = decompose_ball(law)
        for key in ('M_n', 'A_n_size', 'residual_size', 'C_n', 'R_k'):
            self.add_metadata(key, getattr(d, key))
        columns = ['N', 'lower', 'upper', 'upper_loose']
        rows = []
        for N in Ns:
            b = sandwich_bounds(law, N, d)
            rows.append([N, b.lower, b.upper, b.upper_loose])
        if self.params['trials']:
            config = ExperimentConfig(law, N_grid=Ns, trials=self.params['trials'], seed=self.seed,
                                      threads=self.threads)
            self.add_metadata('mass_method', config.mass_method)
            columns += ['F_hat', 'half_width']
            for row, est in zip(rows, estimate_F(config)):
                row += [est.F_hat, est.half_width]
        return columns, rows

register_action(LatticeThresholdAction)
