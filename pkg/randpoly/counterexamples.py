"""Desk-scale constructions that mark the limits of threshold theory.

beta_bernoulli           relative variance of Lambda* for Bernoulli products
discr_prod_sequence      a product of Bernoulli(p_k) laws whose beta diverges
no_threshold_witness     Monte Carlo check that this product has no sharp threshold
atomic_infinite_mean     a compactly supported atomic law with E[Lambda*] = inf
depth_expectation_near_one
                         laws whose expected half-space depth is close to 1
koloun_check             a convex set meeting Z^3 only at the origin

Infinite constructions are truncated, and every truncation reports a
certified bound on what was cut off. Divergence is reported as growing
partial sums, never as a verdict.
"""

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from mpmath import iv
from scipy.special import entr, logit

from . import log
from .action import Action, register_action
from .cramer import directional_lower_bound_from_gaps
from .measures import (CapacityError,
                       DomainError,
                       FiniteAtomicLaw,
                       InvariantError,
                       ProductLaw,
                       as_atomic,
                       make_bernoulli)
from .options import (ChoiceOption,
                      FloatOption,
                      IntListOption,
                      IntOption,
                      OptionError)

module_logger = log.get_module_logger(__file__)

WITNESS_MAX_DIMENSION = 25
INFMEAN_ATOM_CAP = 10**4
BRUTE_FORCE_MAX_DIMENSION = 12
KOLOUN_FLOAT_SLACK = 1e-9
INTERVAL_PRECISIONS = (64, 128, 256, 512, 1024)

def _check_dimension(n, name='n'):
    if int(n) != n or n < 1:
        raise DomainError(name, n, "must be a positive integer")
    return int(n)

def bernoulli_entropy(p):
    """-p log p - (1 - p) log(1 - p), the mean of Lambda* under Bernoulli(p)."""
    return entr(p) + entr(1 - p)

class BetaRecord(NamedTuple):
    mean: float
    variance: float
    beta: float

def beta_bernoulli(p, n=1):
    if not 0 < p < 1:
        raise DomainError('p', p, "must lie in (0, 1)")
    n = _check_dimension(n)
    mean = n * float(bernoulli_entropy(p))
    variance = n * p * (1 - p) * float(logit(p)) ** 2
    return BetaRecord(mean, variance, variance / mean ** 2)

class BernoulliConstants(NamedTuple):
    C: float
    c: float
    p_min: float
    p_max: float

def empirical_bernoulli_constants(p_max=None, p_min=1e-12, n_grid=2000):
    """Empirical C and c with E <= C p log(1/p) and Var >= c p log^2(1/p)
    on a log spaced scan of [p_min, p_max].

    Var vanishes at p = 1/2, so no positive c exists on a scan reaching it;
    the default p_max is the largest success probability of the
    discr_prod_sequence product.
    """
    if p_max is None:
        p_max = float(discr_prod_p(1))
    if not 0 < p_min < p_max < 0.5:
        raise DomainError('p_max', p_max, "need 0 < p_min < p_max < 1/2")
    p = np.geomspace(p_min, p_max, n_grid)
    lp = np.log(p)
    ratio_mean = bernoulli_entropy(p) / (-p * lp)
    ratio_variance = (1 - p) * logit(p) ** 2 / lp ** 2
    return BernoulliConstants(float(ratio_mean.max()), float(ratio_variance.min()), p_min, p_max)

def discr_prod_p(k):
    """p_k = 1 / (k log^3(k + 3))."""
    k = np.asarray(k, dtype=float)
    return 1.0 / (k * np.log(k + 3) ** 3)

def discr_prod_terms(ks):
    """(p_k, E increment, Var increment) for every k in ks."""
    p = discr_prod_p(ks)
    return p, bernoulli_entropy(p), p * (1 - p) * logit(p) ** 2

def discr_prod_tail_bound(n):
    """Upper bound on sum_{k > n} p_k / (1 - p_k).

    For x >= n, 1/x <= (1 + 3/n)/(x + 3), and the integral of
    1/((x + 3) log^3(x + 3)) from n is 1/(2 log^2(n + 3)); p_k is
    decreasing, so 1/(1 - p_k) <= 1/(1 - p_{n+1}).
    """
    n = _check_dimension(n)
    return (1 + 3.0 / n) / (2 * math.log(n + 3) ** 2) / (1 - float(discr_prod_p(n + 1)))

class DiscrProdRecord(NamedTuple):
    n: int
    E_partial: float
    Var_partial: float
    beta: float
    delta0_lower: float
    tail_bound: float

def discr_prod_sequence(n):
    """Exact partial sums of E and Var of Lambda* over the first n factors,
    and a certified lower bound on delta0 = (prod_k (1 - p_k))^2.

    -log(1 - p) <= p/(1 - p) bounds the factors beyond n.
    """
    n = _check_dimension(n)
    p, e, v = discr_prod_terms(np.arange(1, n + 1))
    E = math.fsum(e)
    V = math.fsum(v)
    tail = discr_prod_tail_bound(n)
    delta0 = math.exp(2 * math.fsum(np.log1p(-p)) - 2 * tail)
    return DiscrProdRecord(n, E, V, V / E ** 2, delta0, tail)

def discr_prod_law(n):
    n = _check_dimension(n)
    return ProductLaw([make_bernoulli(float(p)) for p in discr_prod_p(np.arange(1, n + 1))])

def exact_first_capture(n):
    """E[mu(K_1)] = sum_x mu({x})^2 = prod_k (p_k^2 + (1 - p_k)^2)."""
    p = discr_prod_p(np.arange(1, _check_dimension(n) + 1))
    return math.exp(math.fsum(np.log(p ** 2 + (1 - p) ** 2)))

class WitnessRow(NamedTuple):
    N: int
    F_hat: float
    half_width: float
    delta0_lower: float
    lower_ok: bool
    upper_ok: object

class NoThresholdWitness(NamedTuple):
    rows: list
    delta0_lower: float
    exact_first_capture: float
    config: object

@log.trace_function(module_logger)
def no_threshold_witness(n, N_grid, trials, seed=0, threads=1):
    """Estimate F over N_grid for discr_prod_law(n) and check that it stays
    above delta0 everywhere, while F(1) <= 1/2 for n >= 2."""
    from .simulate import ExperimentConfig, estimate_F
    n = _check_dimension(n)
    if n > WITNESS_MAX_DIMENSION:
        raise DomainError('n', n, "vertex counting supports n <= %d" % WITNESS_MAX_DIMENSION)
    config = ExperimentConfig(discr_prod_law(n), N_grid=sorted(N_grid), trials=trials, seed=seed,
                              mass_method='exact_cube', threads=threads)
    delta0 = discr_prod_sequence(n).delta0_lower
    rows = []
    for est in estimate_F(config):
        lower_ok = bool(est.F_hat >= delta0 - 3 * est.half_width)
        upper_ok = None
        if est.N == 1 and n >= 2:
            upper_ok = bool(est.F_hat <= 0.5 + 3 * est.half_width)
        if not lower_ok or upper_ok is False:
            module_logger.warning("no-threshold check failed at N=%d (F_hat=%r)", est.N, est.F_hat)
        rows.append(WitnessRow(est.N, est.F_hat, est.half_width, delta0, lower_ok, upper_ok))
    return NoThresholdWitness(rows, delta0, exact_first_capture(n), config)

# Atoms x_2 = 0 and x_k = (cos(1/k), sin(1/k), ...) with weights
# proportional to 1/(k log^2 k), truncated after K atoms.

def infmean_log_weights(K):
    k = np.arange(2, K + 1, dtype=float)
    return -np.log(k) - 2 * np.log(np.log(k))

def infmean_law(n, K):
    """The truncated atomic law in R^n, for n >= 2 and atoms 2..K.

    Atom k has a 1 at coordinate k (1-based) for 3 <= k <= n.
    """
    n = _check_dimension(n)
    if n < 2:
        raise DomainError('n', n, "construction needs n >= 2")
    ks = np.arange(2, K + 1)
    points = np.zeros((len(ks), n))
    points[1:, 0] = np.cos(1.0 / ks[1:])
    points[1:, 1] = np.sin(1.0 / ks[1:])
    for k in range(3, min(n, K) + 1):
        points[k - 2, k - 1] = 1.0
    return FiniteAtomicLaw.from_weights(points, np.exp(infmean_log_weights(K)))

def infmean_gaps(k, K):
    """<xi_k, x_m - x_k> for m = 2..K, with xi_k = (cos(1/k), sin(1/k), 0, ...).

    cos(1/k - 1/m) - 1 is written as -2 sin^2((1/k - 1/m)/2) to keep
    precision for neighbouring atoms.
    """
    m = np.arange(2, K + 1, dtype=float)
    gaps = -2 * np.sin((1.0 / k - 1.0 / m) / 2) ** 2
    gaps[0] = -1.0
    return gaps

class InfiniteMeanRow(NamedTuple):
    k: int
    p_k: float
    lower_bound: float
    envelope_bound: float
    log_inv_p: float
    partial_sum: float

class InfiniteMeanTable(NamedTuple):
    rows: list
    K_atoms: int
    normalizer: float
    normalizer_infinite_lower: float
    tail_bound: float

@log.trace_function(module_logger)
def atomic_infinite_mean(n, K_atoms, t_max=1e20, probe_ks=None, n_grid=256):
    """Certified lower bounds on Lambda*(x_k) for the truncated law and the
    partial sums of p_k Lambda*(x_k).

    lower_bound maximizes <t xi_k, x_k> - Lambda(t xi_k) over a t grid.
    Partial sums use the envelope -log(p_k + (1 - p_k) e^{t B_k}), where
    B_k = cos(1/(k(k+1))) - 1 bounds every gap but the zero one; it never
    exceeds the grid bound, and costs O(1) per atom.
    """
    n = _check_dimension(n)
    if n < 2:
        raise DomainError('n', n, "construction needs n >= 2")
    if not 3 <= K_atoms <= INFMEAN_ATOM_CAP:
        raise CapacityError("atomic construction", K_atoms, INFMEAN_ATOM_CAP)
    log_w = infmean_log_weights(K_atoms)
    S = math.fsum(np.exp(log_w))
    log_p = log_w - math.log(S)
    p = np.exp(log_p)
    ts = np.concatenate(([0.0], np.geomspace(1e-3, t_max, n_grid)))

    ks = np.arange(3, K_atoms + 1, dtype=float)
    B = -2 * np.sin(1.0 / (2 * ks * (ks + 1))) ** 2
    lp = log_p[1:, None]
    envelope = (-np.logaddexp(lp, np.log1p(-p[1:, None]) + ts[None, :] * B[:, None])).max(axis=1)
    envelope = np.concatenate(([0.0], np.maximum(envelope, 0.0)))
    partial = np.cumsum(p * envelope)

    if probe_ks is None:
        probe_ks = [k for k in (2, 3, 10, 100, 1000, 10000) if k <= K_atoms]
        if probe_ks[-1] != K_atoms:
            probe_ks.append(K_atoms)
    rows = []
    for k in sorted(probe_ks):
        if not 2 <= k <= K_atoms:
            raise DomainError('k', k, "probe outside 2..%d" % K_atoms)
        i = k - 2
        if k == 2:
            lower = 0.0
        else:
            lower = max(float(directional_lower_bound_from_gaps(infmean_gaps(k, K_atoms), log_p, ts).max()), 0.0)
        rows.append(InfiniteMeanRow(k, float(p[i]), lower, float(envelope[i]), float(-log_p[i]),
                                    float(partial[i])))
    # sum_{k > K} 1/(k log^2 k) <= 1/log K
    tail = 1.0 / math.log(K_atoms)
    return InfiniteMeanTable(rows, K_atoms, 1.0 / S, 1.0 / (S + tail), tail / S)

def depth_expectation_probs(epsilon, n):
    """p_i = epsilon / 2^(i + 1) for i = 1..n."""
    return epsilon / 2.0 ** (np.arange(1, n + 1) + 1)

def depth_expectation_near_one(epsilon, n):
    """E[q_X(X)] = prod_i (1 - 2 p_i (1 - p_i)) for independent Bernoulli(p_i).

    On {0,1}^n the depth q_X(x) equals P(X = x): the half-space
    <s, y> >= <s, x> with s = 2x - 1 meets the cube only at x.
    """
    if not 0 < epsilon < 1:
        raise DomainError('epsilon', epsilon, "must lie in (0, 1)")
    p = depth_expectation_probs(epsilon, _check_dimension(n))
    value = math.exp(math.fsum(np.log1p(-2 * p * (1 - p))))
    if value < 1 - epsilon:
        raise InvariantError("E[q] = %r below 1 - epsilon = %r" % (value, 1 - epsilon))
    return value

def depth_expectation_brute_force(epsilon, n):
    """sum_x P(X = x)^2 over the 2^n vertices."""
    n = _check_dimension(n)
    if n > BRUTE_FORCE_MAX_DIMENSION:
        raise CapacityError("vertex enumeration", 2 ** n, 2 ** BRUTE_FORCE_MAX_DIMENSION)
    law = ProductLaw([make_bernoulli(float(p)) for p in depth_expectation_probs(epsilon, n)])
    return math.fsum(as_atomic(law).probs ** 2)

class KolounRecord(NamedTuple):
    points_found: list
    candidates: int
    interval_checks: int

def _interval_le(z1, z3, bound):
    """(z1 - sqrt(2) z3)^2 <= bound, decided by interval arithmetic."""
    saved = iv.prec
    try:
        for prec in INTERVAL_PRECISIONS:
            iv.prec = prec
            lhs = (iv.mpf(z1) - iv.sqrt(2) * z3) ** 2
            verdict = lhs <= iv.mpf(bound.numerator) / bound.denominator
            if verdict is not None:
                return verdict
    finally:
        iv.prec = saved
    raise InvariantError("undecided at z=(%d, ., %d) after %d bits" % (z1, z3, INTERVAL_PRECISIONS[-1]))

def koloun_check(w):
    """All z in Z^3 with |z_i| <= w and (z1 - sqrt(2) z3)^2 + (z2 - 1/3)^2 <= 1/9.

    (z2 - 1/3)^2 is kept as a Fraction. A float prefilter drops pairs
    (z1, z3) far outside; the rest are decided exactly (z3 = 0) or by
    intervals.
    """
    w = _check_dimension(w, 'w')
    axis = np.arange(-w, w + 1)
    slack = {}
    for z2 in axis.tolist():
        s = Fraction(1, 9) - Fraction(3 * z2 - 1, 3) ** 2
        if s >= 0:
            slack[z2] = s
    z1, z3 = (a.ravel() for a in np.meshgrid(axis, axis, indexing='ij'))
    approx = (z1 - math.sqrt(2) * z3) ** 2
    found = []
    checks = 0
    for z2, s in sorted(slack.items()):
        near = np.nonzero(approx <= float(s) + KOLOUN_FLOAT_SLACK * (1 + approx))[0]
        for i in near.tolist():
            a, c = int(z1[i]), int(z3[i])
            if c == 0:
                inside = Fraction(a * a) <= s
            else:
                checks += 1
                inside = _interval_le(a, c, s)
            if inside:
                found.append((a, z2, c))
    return KolounRecord(sorted(found), (2 * w + 1) ** 3, checks)

WHICH = ('beta', 'constants', 'discr', 'noth', 'infmean', 'depth1', 'koloun')

class CounterexampleAction(Action):
    action_name = 'counterexample'
    tooltip = 'Tabulate one of the counterexample constructions (--which).'

    def get_options(self):
        return [ChoiceOption('which', WHICH, required=True, tooltip='|'.join(WHICH)),
                FloatOption('p', minimum=0, maximum=1, default=0.5, tooltip='Bernoulli success probability.'),
                IntListOption('n', minimum=1, default=[1], tooltip='Comma separated dimensions.'),
                IntListOption('N', minimum=0, tooltip='Comma separated sample counts (noth).'),
                IntOption('K', minimum=3, default=1000, tooltip='Atoms kept in the infmean construction.'),
                FloatOption('t-max', minimum=0, default=1e20, tooltip='Largest t of the infmean grid.'),
                FloatOption('epsilon', minimum=0, maximum=1, default=0.5, tooltip='Target gap for depth1.'),
                IntOption('w', minimum=1, default=50, tooltip='Box half width for koloun.'),
                IntOption('trials', minimum=1, default=200, tooltip='Monte Carlo trials (noth).')]

    def run(self):
        return getattr(self, 'run_' + self.params['which'])()

    def single_n(self):
        ns = self.params['n']
        if len(ns) != 1:
            raise OptionError('--n', ','.join(map(str, ns)), "%s takes a single dimension" % self.params['which'])
        return ns[0]

    def run_beta(self):
        p = self.params['p']
        return ['p', 'n', 'mean', 'variance', 'beta'], [[p, n] + list(beta_bernoulli(p, n)) for n in self.params['n']]

    def run_constants(self):
        c = empirical_bernoulli_constants()
        return ['C', 'c', 'p_min', 'p_max'], [list(c)]

    def run_discr(self):
        return list(DiscrProdRecord._fields), [list(discr_prod_sequence(n)) for n in self.params['n']]

    def run_noth(self):
        if not self.params.get('N'):
            raise OptionError('--N', '', "noth needs a grid of sample counts")
        self.ensure_seed()
        witness = no_threshold_witness(self.single_n(), self.params['N'], self.params['trials'], self.seed,
                                       self.threads)
        self.add_metadata('delta0_lower', witness.delta0_lower)
        self.add_metadata('exact_first_capture', witness.exact_first_capture)
        return list(WitnessRow._fields), [list(r) for r in witness.rows]

    def run_infmean(self):
        n = self.single_n()
        table = atomic_infinite_mean(max(n, 2), self.params['K'], self.params['t_max'])
        self.add_metadata('K_atoms', table.K_atoms)
        self.add_metadata('normalizer', table.normalizer)
        self.add_metadata('normalizer_infinite_lower', table.normalizer_infinite_lower)
        self.add_metadata('tail_bound', table.tail_bound)
        return list(InfiniteMeanRow._fields), [list(r) for r in table.rows]

    def run_depth1(self):
        eps = self.params['epsilon']
        rows = []
        for n in self.params['n']:
            brute = depth_expectation_brute_force(eps, n) if n <= BRUTE_FORCE_MAX_DIMENSION else None
            rows.append([n, eps, depth_expectation_near_one(eps, n), brute])
        return ['n', 'epsilon', 'expectation', 'brute_force'], rows

    def run_koloun(self):
        record = koloun_check(self.params['w'])
        self.add_metadata('candidates', record.candidates)
        self.add_metadata('interval_checks', record.interval_checks)
        return ['z1', 'z2', 'z3'], [list(z) for z in record.points_found]

register_action(CounterexampleAction)
