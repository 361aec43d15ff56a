"""Monte Carlo engine for the captured mass F_{n,N}(mu) = E[mu(K_N)].

Every trial draws its N_max samples once from its own counter based stream
(Philox keyed by seed, trial index and stream number) and evaluates mu(K_N)
on nested prefixes of them, so estimates are nondecreasing in N within a
trial and independent of thread scheduling.

Also here: the closed forms for the cube and the coupon collector, the two
bound calculators built on the law of Lambda*, and threshold curve scans.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

from . import log
from .action import Action, register_action
from .cache import measure_cache
from .computation import ComputeManager
from .cramer import cramer_distribution
from .geometry import MARGINAL_TOLERANCE, hull_membership
from .lattice import cross_polytope_capture_curve
from .measures import (CapacityError,
                       DomainError,
                       FiniteAtomicLaw,
                       LatticeBallLaw,
                       Pmf1D,
                       ProductLaw,
                       as_atomic,
                       as_product,
                       make_cube,
                       measure_from_json)
from .options import IntListOption, IntOption
from .preset import (ChoiceSetting,
                     ConfigError,
                     FloatListSetting,
                     FloatSetting,
                     IntListSetting,
                     IntSetting,
                     JSONSetting,
                     PositiveIntSetting,
                     SettingStruct,
                     config_digest,
                     load_config,
                     presets)

module_logger = log.get_module_logger(__file__)

CONFIDENCE = 0.99
Z_CONFIDENCE = float(norm.ppf(0.5 + CONFIDENCE / 2))
MASS_METHODS = ('auto', 'exact_cube', 'exact_cross_polytope', 'support_enumeration_lp', 'mc_inner')
# Largest support handled by support_enumeration_lp, and chosen by 'auto'.
LP_SUPPORT_CAP = 10**5
AUTO_LP_SUPPORT = 2000
SAMPLE_CAP = 10**8
MAX_VERTEX_BITS = 62
STREAM_OUTER = 0
STREAM_INNER = 1
STREAM_COUPON = 2
GRID_CAVEAT = "rho hats are grid-wise: conditions are checked at grid points only"

_supports = measure_cache('enumerated supports', 16)

def trial_rng(seed, trial, stream=STREAM_OUTER):
    """Generator for one (seed, trial, stream) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial), int(stream)])))

class AliasTable(object):
    """Vose alias table: constant time draws from a finite law."""
    def __init__(self, probs):
        probs = np.asarray(probs, dtype=float)
        m = len(probs)
        scaled = probs * (m / probs.sum())
        self.prob = np.ones(m)
        self.alias = np.arange(m)
        small = [i for i in range(m) if scaled[i] < 1.0]
        large = [i for i in range(m) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] += scaled[s] - 1.0
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)

    def __len__(self):
        return len(self.prob)

    def sample(self, rng, size):
        i = rng.integers(len(self.prob), size=size)
        u = rng.random(size)
        return np.where(u < self.prob[i], i, self.alias[i])

class ProductSampler(object):
    """Inverse CDF per coordinate on the truncated supports."""
    def __init__(self, law):
        self.law = law
        self.n = law.n
        self.cums = [np.cumsum(f.masses) for f in law.factors]
        self.los = [f.lo for f in law.factors]

    def draw(self, rng, size):
        u = rng.random((size, self.n))
        out = np.empty((size, self.n), dtype=np.int64)
        for i, (cum, lo) in enumerate(zip(self.cums, self.los)):
            idx = np.searchsorted(cum, u[:, i], side='right')
            out[:, i] = lo + np.minimum(idx, len(cum) - 1)
        return out

class AtomicSampler(object):
    def __init__(self, law):
        self.law = law
        self.n = law.n
        self.table = AliasTable(law.probs)

    def draw(self, rng, size):
        return self.law.points[self.table.sample(rng, size)]

class LatticeBallSampler(object):
    """Uniform draws from L_n. The r = 1 ball is sampled from its 2n + 1
    atom codes without enumerating."""
    def __init__(self, law):
        self.law = law
        self.n = law.n

    def draw(self, rng, size):
        if self.law.is_cross_polytope:
            codes = rng.integers(-self.n, self.n + 1, size=size)
            out = np.zeros((size, self.n), dtype=np.int64)
            hit = codes != 0
            out[np.nonzero(hit)[0], np.abs(codes[hit]) - 1] = np.sign(codes[hit])
            return out
        points = self.law.points
        return points[rng.integers(len(points), size=size)]

def make_sampler(measure):
    if isinstance(measure, LatticeBallLaw):
        return LatticeBallSampler(measure)
    if isinstance(measure, FiniteAtomicLaw):
        return AtomicSampler(measure)
    return ProductSampler(as_product(measure))

def support_size(measure):
    if isinstance(measure, LatticeBallLaw):
        return measure.M
    if isinstance(measure, FiniteAtomicLaw):
        return len(measure)
    return as_product(measure).support_size

def default_scale(measure):
    """log of the support size: n log 2 on the cube, log M_n on lattice balls."""
    return math.log(support_size(measure))

def resolve_mass_method(measure, method='auto'):
    is_binary = isinstance(measure, (Pmf1D, ProductLaw)) and as_product(measure).is_binary()
    is_cross = isinstance(measure, LatticeBallLaw) and measure.is_cross_polytope
    if method == 'auto':
        if is_binary and as_product(measure).n <= MAX_VERTEX_BITS:
            return 'exact_cube'
        if is_cross:
            return 'exact_cross_polytope'
        if support_size(measure) <= AUTO_LP_SUPPORT:
            return 'support_enumeration_lp'
        return 'mc_inner'
    if method == 'exact_cube' and not is_binary:
        raise ConfigError('mass_method', method, "needs a product of laws on {0, 1}")
    if method == 'exact_cube' and as_product(measure).n > MAX_VERTEX_BITS:
        raise CapacityError("cube vertex codes", as_product(measure).n, MAX_VERTEX_BITS)
    if method == 'exact_cross_polytope' and not is_cross:
        raise ConfigError('mass_method', method, "needs the r = 1 lattice ball")
    if method == 'support_enumeration_lp':
        size = support_size(measure)
        if size > LP_SUPPORT_CAP:
            raise CapacityError("support enumeration for LP mass", size, LP_SUPPORT_CAP)
    if method not in MASS_METHODS:
        raise ConfigError('mass_method', method, "must be one of %s" % ', '.join(MASS_METHODS))
    return method

class MassMethodSetting(ChoiceSetting):
    choices = MASS_METHODS

class SeedSetting(IntSetting):
    minimum = 0

class ExperimentSettings(SettingStruct):
    setting_types = {'measure': JSONSetting,
                     'N_grid': IntListSetting,
                     'rho_grid': FloatListSetting,
                     'trials': PositiveIntSetting,
                     'seed': SeedSetting,
                     'mass_method': MassMethodSetting,
                     'inner_samples': PositiveIntSetting,
                     'delta': FloatSetting,
                     'T_n': FloatSetting,
                     'threads': PositiveIntSetting}
    defaults = {'trials': 100,
                'seed': 0,
                'mass_method': 'auto',
                'inner_samples': 1000,
                'delta': 0.1,
                'threads': 1}
    alternatives = (('N_grid', 'rho_grid'),)

presets.register_type('experiment', ExperimentSettings)

class ExperimentConfig(object):
    """A validated experiment: measure, grid, trial count, seed and mass
    method, with every default resolved."""
    def __init__(self, measure, N_grid=None, rho_grid=None, trials=100, seed=0, mass_method='auto',
                 inner_samples=1000, delta=0.1, T_n=None, threads=1):
        if measure is None:
            raise ConfigError('measure', None, "a measure is required")
        if isinstance(measure, dict):
            measure = measure_from_json(measure)
        self.measure = measure
        if (N_grid is None) == (rho_grid is None):
            raise ConfigError('N_grid', N_grid, "give exactly one of N_grid and rho_grid")
        grid = N_grid if N_grid is not None else rho_grid
        if not len(grid) or list(grid) != sorted(grid):
            raise ConfigError('N_grid' if N_grid is not None else 'rho_grid', grid, "grid must be nonempty and sorted")
        if N_grid is not None and min(N_grid) < 0:
            raise ConfigError('N_grid', N_grid, "sample counts must be nonnegative")
        if int(trials) < 1:
            raise ConfigError('trials', trials, "need at least one trial")
        if not 0 <= int(seed) < 2**64:
            raise ConfigError('seed', seed, "must be a 64-bit nonnegative integer")
        if not 0 < delta < 1:
            raise ConfigError('delta', delta, "must lie in (0, 1)")
        if int(inner_samples) < 1:
            raise ConfigError('inner_samples', inner_samples, "need at least one inner sample")
        if T_n is not None and not T_n > 0:
            raise ConfigError('T_n', T_n, "scale must be positive")
        self.N_grid = None if N_grid is None else [int(N) for N in N_grid]
        self.rho_grid = None if rho_grid is None else [float(r) for r in rho_grid]
        self.trials = int(trials)
        self.seed = int(seed)
        self.mass_method = resolve_mass_method(measure, mass_method)
        self.inner_samples = int(inner_samples)
        self.delta = float(delta)
        self.T_n = float(T_n) if T_n is not None else default_scale(measure)
        self.threads = max(1, int(threads))

    @classmethod
    def from_value(cls, value, **overrides):
        value = dict(value)
        value.update((k, v) for k, v in overrides.items() if v is not None)
        unknown = sorted(set(value) - set(ExperimentSettings.setting_types))
        if unknown:
            raise ConfigError(unknown[0], value[unknown[0]], "unknown configuration key")
        return cls(**value)

    @classmethod
    def load(cls, source, **overrides):
        """From a JSON file or a preset name such as "experiment:cube12"."""
        return cls.from_value(load_config(source, ExperimentSettings).get_value(), **overrides)

    def grid(self):
        """(rho, N) pairs sorted by N."""
        if self.rho_grid is not None:
            return [(rho, int(math.ceil(math.exp(rho * self.T_n)))) for rho in self.rho_grid]
        return [(math.log(N) / self.T_n if N > 0 else None, N) for N in self.N_grid]

    def to_value(self):
        """The resolved configuration echoed into output headers; the thread
        count is left out since it never changes results."""
        return {'measure': self.measure.to_json(),
                'N_grid': self.N_grid,
                'rho_grid': self.rho_grid,
                'trials': self.trials,
                'seed': self.seed,
                'mass_method': self.mass_method,
                'inner_samples': self.inner_samples,
                'delta': self.delta,
                'T_n': self.T_n}

    @property
    def digest(self):
        return config_digest(self.to_value())

def _cube_curve(samples, law, Ns):
    """Captured mass on prefixes for a product on {0, 1}^n: the hull of
    cube vertices holds no other vertex, so mu(K_N) sums the masses of the
    distinct vertices drawn."""
    weights = np.uint64(1) << np.arange(law.n, dtype=np.uint64)
    codes = (samples.astype(np.uint64) * weights).sum(axis=1)
    _, first = np.unique(codes, return_index=True)
    first = np.sort(first)
    masses = np.exp(-law.log_mass(samples[first]))
    cum = np.concatenate(([0.0], np.cumsum(masses)))
    return np.minimum(cum[np.searchsorted(first, Ns, side='left')], 1.0), np.zeros(len(Ns))

def _nested_hull_curve(samples, targets, weights, Ns, tol, marginal_weights=None):
    """Mass of targets inside conv(samples[:N]) for each N in Ns.

    Captured targets stay captured for longer prefixes, so each N only tests
    the rest. Marginal targets count for neither side; their total
    marginal_weights (default: weights) is returned next to the mass.
    """
    if marginal_weights is None:
        marginal_weights = weights
    captured = np.zeros(len(targets), dtype=bool)
    mass = np.zeros(len(Ns))
    marginal = np.zeros(len(Ns))
    index = dict((tuple(t), i) for i, t in enumerate(targets.tolist()))
    for j, N in enumerate(Ns):
        if N == 0:
            continue
        hull = np.unique(samples[:N], axis=0)
        for p in hull.tolist():
            i = index.get(tuple(p))
            if i is not None:
                captured[i] = True
        undecided = 0.0
        for i in np.nonzero(~captured)[0]:
            w = hull_membership(targets[i], hull, tol)
            if w.status == 'inside':
                captured[i] = True
            elif w.status == 'marginal':
                undecided += marginal_weights[i]
        mass[j] = math.fsum(weights[captured])
        marginal[j] = undecided
    return np.minimum(mass, 1.0), marginal

class TrialRunner(object):
    """mu(K_N) over the N grid for one trial index."""
    def __init__(self, config, Ns):
        self.config = config
        self.Ns = np.asarray(Ns, dtype=np.int64)
        self.N_max = int(self.Ns.max()) if len(self.Ns) else 0
        self.sampler = make_sampler(config.measure)
        self.method = config.mass_method
        if self.N_max * self.sampler.n > SAMPLE_CAP:
            raise CapacityError("samples per trial", self.N_max * self.sampler.n, SAMPLE_CAP)
        if self.method == 'support_enumeration_lp':
            atomic = _supports.get_or_compute(config.measure, (LP_SUPPORT_CAP,), as_atomic, config.measure,
                                              LP_SUPPORT_CAP)
            self.targets = atomic.points
            self.weights = atomic.probs
            # Marginal fraction counts support points, not their mass.
            self.marginal_weights = np.full(len(atomic), 1.0 / len(atomic))

    def __call__(self, trial):
        rng = trial_rng(self.config.seed, trial, STREAM_OUTER)
        samples = self.sampler.draw(rng, self.N_max)
        if self.method == 'exact_cube':
            return _cube_curve(samples, as_product(self.config.measure), self.Ns)
        if self.method == 'exact_cross_polytope':
            return cross_polytope_capture_curve(samples, self.config.measure, self.Ns), np.zeros(len(self.Ns))
        if self.method == 'support_enumeration_lp':
            return _nested_hull_curve(samples, self.targets, self.weights, self.Ns, MARGINAL_TOLERANCE,
                                      self.marginal_weights)
        inner = self.sampler.draw(trial_rng(self.config.seed, trial, STREAM_INNER), self.config.inner_samples)
        targets, counts = np.unique(inner, axis=0, return_counts=True)
        return _nested_hull_curve(samples, targets, counts / self.config.inner_samples, self.Ns,
                                  MARGINAL_TOLERANCE)

class CurveRow(NamedTuple):
    rho: object
    N: int
    F_hat: float
    half_width: float
    marginal_fraction: float

def summarize(values):
    """Column means and normal approximation half-widths at CONFIDENCE.

    A single trial has no spread estimate; its half-width is nan.
    """
    values = np.asarray(values, dtype=float)
    mean = values.mean(axis=0)
    if len(values) < 2:
        return mean, np.full(mean.shape, math.nan)
    return mean, Z_CONFIDENCE * values.std(axis=0, ddof=1) / math.sqrt(len(values))

@log.trace_function(module_logger)
def estimate_F(config):
    """Monte Carlo estimate of F_{n,N} for every N of the configured grid."""
    grid = config.grid()
    Ns = [N for _, N in grid]
    runner = TrialRunner(config, Ns)
    manager = ComputeManager(config.threads)
    for trial in range(config.trials):
        manager.add(runner, trial)
    results = manager.compute_all()
    masses = np.array([r[0] for r in results])
    marginal = np.array([r[1] for r in results])
    F_hat, half_width = summarize(masses)
    marginal_fraction = marginal.mean(axis=0)
    if np.any(marginal_fraction > 0):
        module_logger.warning("LP marginal points excluded from mass (max fraction %g)", marginal_fraction.max())
    return [CurveRow(rho, N, float(np.clip(F, 0.0, 1.0)), float(h), float(m))
            for (rho, N), F, h, m in zip(grid, F_hat, half_width, marginal_fraction)]

class ThresholdCurve(object):
    columns = ('rho', 'N', 'F_hat', 'half_width', 'marginal_fraction')

    def __init__(self, rows, rho1_hat, rho2_hat, T_n, delta, metadata=None):
        self.rows = rows
        self.rho1_hat = rho1_hat
        self.rho2_hat = rho2_hat
        self.T_n = T_n
        self.delta = delta
        self.metadata = metadata or {}

    def __len__(self):
        return len(self.rows)

def rho_hats(rows, delta):
    """rho1: the largest rho such that F_hat + half_width <= delta at every
    grid point up to it. rho2: the smallest rho such that F_hat - half_width
    >= 1 - delta at every grid point from it on."""
    rows = [r for r in rows if r.rho is not None]
    rho1 = None
    for row in rows:
        if not row.F_hat + row.half_width <= delta:
            break
        rho1 = row.rho
    rho2 = None
    for row in reversed(rows):
        if not row.F_hat - row.half_width >= 1 - delta:
            break
        rho2 = row.rho
    return rho1, rho2

@log.trace_function(module_logger)
def threshold_scan(config, T_n=None):
    """Estimate F over the grid N = ceil(exp(rho T_n)) and read off rho1/rho2."""
    if T_n is not None:
        config.T_n = float(T_n)
    rows = sorted(estimate_F(config), key=lambda r: r.N)
    rho1, rho2 = rho_hats(rows, config.delta)
    metadata = {'grid_caveat': GRID_CAVEAT,
                'mass_method': config.mass_method,
                'trials': config.trials,
                'confidence': CONFIDENCE}
    return ThresholdCurve(rows, rho1, rho2, config.T_n, config.delta, metadata)

def exact_cube_F(n, N):
    """1 - (1 - 2^-n)^N."""
    if int(n) != n or n < 1:
        raise DomainError('n', n, "dimension must be a positive integer")
    if N < 0:
        raise DomainError('N', N, "must be nonnegative")
    if N == 0:
        return 0.0
    return -math.expm1(N * math.log1p(-2.0 ** -n))

def cube_threshold_bounds(n, N):
    """1 - exp(-N/2^n) <= F <= 1 - exp(-N/(2^n - 1))."""
    exact_cube_F(n, N)
    return -math.expm1(-N / 2.0 ** n), -math.expm1(-N / (2.0 ** n - 1))

def coupon_expectation(M, N):
    """E[D_N] = M(1 - (1 - 1/M)^N) distinct values among N uniform draws."""
    if int(M) != M or M < 1:
        raise DomainError('M', M, "must be a positive integer")
    if N < 0:
        raise DomainError('N', N, "must be nonnegative")
    if N == 0:
        return 0.0
    if M == 1:
        return 1.0
    return -M * math.expm1(N * math.log1p(-1.0 / M))

class CouponRow(NamedTuple):
    N: int
    D_hat: float
    half_width: float
    exact: float

def estimate_coupon(M, N_grid, trials, seed=0):
    Ns = np.asarray(N_grid, dtype=np.int64)
    N_max = int(Ns.max())
    counts = np.empty((int(trials), len(Ns)))
    for trial in range(int(trials)):
        draws = trial_rng(seed, trial, STREAM_COUPON).integers(M, size=N_max)
        first = np.sort(np.unique(draws, return_index=True)[1])
        counts[trial] = np.searchsorted(first, Ns, side='left')
    mean, half_width = summarize(counts)
    return [CouponRow(int(N), float(m), float(h), coupon_expectation(M, int(N)))
            for N, m, h in zip(Ns, mean, half_width)]

def dfm_upper_bound(laws, N, r):
    """mu_n(B_r) + N e^{-r}, clamped to [0, 1]."""
    dist = cramer_distribution(as_product(laws))
    if dist.binned:
        module_logger.warning("upper bound read from a binned Lambda* distribution (width %g)", dist.bin_width)
    return min(max(dist.cdf(r) + N * math.exp(-r), 0.0), 1.0)

def supporting_halfspace_depth(r, n, zeta):
    """Analytic plug-in exp(-(1 + zeta) r - 2 zeta n) for the infimum of the
    depth over B_r."""
    if zeta < 0:
        raise DomainError('zeta', zeta, "must be nonnegative")
    return math.exp(-(1 + zeta) * r - 2 * zeta * n)

class DfmLowerBound(NamedTuple):
    value: float
    degenerate: bool
    inf_depth: float
    p_max: float
    ball_mass: float

def _log_binom(N, n):
    return float(gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1))

def _capped_exp(x):
    return math.exp(min(x, 700.0))

def dfm_lower_bound(laws, N, r, inf_depth=None, p_max=None, zeta=None):
    """mu_n(B_r) (1 - C(N,n) p_max^{N-n} - 2 C(N,n) (1 - inf_depth)^{N-n}).

    inf_depth is a certified lower bound on the depth over B_r; when it is
    not given the analytic plug-in with parameter zeta is used. N <= n gives
    the degenerate bound 0.
    """
    laws = as_product(laws)
    n = laws.n
    if inf_depth is None:
        if zeta is None:
            raise DomainError('inf_depth', None, "give a certified depth bound or the plug-in parameter zeta")
        inf_depth = supporting_halfspace_depth(r, n, zeta)
    if not 0 < inf_depth <= 1:
        raise DomainError('inf_depth', inf_depth, "must lie in (0, 1]")
    if p_max is None:
        p_max = laws.largest_atom
    if not 0 < p_max <= 1:
        raise DomainError('p_max', p_max, "must lie in (0, 1]")
    ball = cramer_distribution(laws).cdf(r)
    if N <= n:
        module_logger.warning("lower bound degenerate for N=%d <= n=%d", N, n)
        return DfmLowerBound(0.0, True, inf_depth, p_max, ball)
    log_binom = _log_binom(N, n)
    first = _capped_exp(log_binom + (N - n) * math.log(p_max))
    second = 0.0 if inf_depth == 1 else 2 * _capped_exp(log_binom + (N - n) * math.log1p(-inf_depth))
    value = min(max(ball * (1 - first - second), 0.0), 1.0)
    return DfmLowerBound(value, False, inf_depth, p_max, ball)

presets.add_builtin('experiment:cube10', {
    'measure': make_cube(10).to_json(), 'N_grid': [256, 1024, 4096], 'trials': 500,
    'mass_method': 'exact_cube'})
presets.add_builtin('experiment:cube12', {
    'measure': make_cube(12).to_json(), 'rho_grid': [0.5, 0.75, 1.0, 1.25, 1.5], 'trials': 200,
    'mass_method': 'exact_cube', 'delta': 0.1})
presets.add_builtin('experiment:crosspolytope10', {
    'measure': {'type': 'lattice_ball', 'n': 10, 'r': 1, 'p': 1}, 'N_grid': [5, 21, 100, 400],
    'trials': 2000, 'mass_method': 'exact_cross_polytope'})
presets.add_builtin('experiment:crosspolytope40', {
    'measure': {'type': 'lattice_ball', 'n': 40, 'r': 1, 'p': 1}, 'rho_grid': [0.3, 0.5, 1.0, 1.5],
    'trials': 2000, 'mass_method': 'exact_cross_polytope', 'delta': 0.1})

class ExactCubeAction(Action):
    action_name = 'exact-cube'
    tooltip = 'Exact captured mass of the uniform cube law, with optional Monte Carlo check.'

    def get_options(self):
        return [IntOption('n', minimum=1, required=True, tooltip='Dimension of {0,1}^n.'),
                IntListOption('N', minimum=0, required=True, tooltip='Comma separated sample counts.'),
                IntOption('trials', minimum=0, default=0, tooltip='Monte Carlo trials (0 for none).')]

    def run(self):
        self.ensure_seed()
        n = self.params['n']
        Ns = sorted(self.params['N'])
        columns = ['N', 'F_exact', 'lower', 'upper']
        rows = []
        for N in Ns:
            rows.append([N, exact_cube_F(n, N)] + list(cube_threshold_bounds(n, N)))
        if self.params['trials']:
            config = ExperimentConfig(make_cube(n), N_grid=Ns, trials=self.params['trials'], seed=self.seed,
                                      mass_method='exact_cube', threads=self.threads)
            columns += ['F_hat', 'half_width']
            for row, est in zip(rows, estimate_F(config)):
                row += [est.F_hat, est.half_width]
        return columns, rows

class MCThresholdAction(Action):
    action_name = 'mc-threshold'
    tooltip = 'Monte Carlo threshold curve for a configured experiment (--config file or preset).'
    uses_config = True

    def run(self):
        if not self.config:
            raise ConfigError('--config', None, "mc-threshold needs a configuration file or preset")
        config = ExperimentConfig.load(self.config, seed=self.seed, threads=self.threads)
        self.seed = config.seed
        self.experiment = config
        self.label_run()
        curve = threshold_scan(config)
        self.add_metadata('T_n', curve.T_n)
        self.add_metadata('delta', curve.delta)
        self.add_metadata('rho1_hat', curve.rho1_hat)
        self.add_metadata('rho2_hat', curve.rho2_hat)
        for key in sorted(curve.metadata):
            self.add_metadata(key, curve.metadata[key])
        return list(ThresholdCurve.columns), [list(r) for r in curve.rows]

    def resolved_config(self):
        return self.experiment.to_value()

register_action(ExactCubeAction)
register_action(MCThresholdAction)
