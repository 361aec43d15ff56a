"""Log-moment generating functions, Legendre conjugation and the law of the
Cramer transform under product measures.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp, softmax

from . import log
from .action import Action, register_action
from .cache import measure_cache
from .measures import (CapacityError,
                       DomainError,
                       FiniteAtomicLaw,
                       InvariantError,
                       LatticeBallLaw,
                       Pmf1D,
                       ProductLaw,
                       as_product,
                       merge_atoms,
                       read_measure)
from .options import BooleanOption, FileOption, FloatListOption, OptionError

module_logger = log.get_module_logger(__file__)

# Points closer than this to the edge of the MGF domain count as outside.
DOMAIN_EDGE_TOLERANCE = 1e-10
ENDPOINT_TOLERANCE = 1e-12

class BetaUndefinedError(ZeroDivisionError):
    pass

class NotApplicableError(ValueError):
    pass

class TruncationError(CapacityError):
    def __init__(self, x, hi):
        CapacityError.__init__(self, "evaluation beyond truncated support", x, hi)

    def __str__(self):
        return "x=%r lies beyond the truncated support edge %r of a conceptually unbounded law" % (self.estimate, self.cap)

class SolverSettings(NamedTuple):
    tol_x: float = 1e-12
    tol_xi: float = 1e-12
    max_iter: int = 200

class LegendrePoint(NamedTuple):
    value: float
    xi: float
    flagged: bool = False

class CramerEvaluator1D(object):
    """Lambda, Lambda' and Lambda* of a Pmf1D.

    The MGF domain is (xi_lo, xi_star). Each finite edge is estimated as
    -log of the mass ratio at the truncation edge; edge_converged records
    whether that ratio had settled there.
    """
    logger = log.get_logger('CramerEvaluator1D')

    def __init__(self, pmf, solver=None):
        self.pmf = pmf
        self.solver = solver or SolverSettings()
        self.ks = pmf.ks.astype(float)
        self.logp = -pmf.g
        self.x_star = float(pmf.k_max)
        self.x_lo = float(pmf.k_min)
        self.p_star = math.exp(-pmf.g[-1])
        self.p_lo = math.exp(-pmf.g[0])
        self.edge_converged = True
        self.xi_star = math.inf
        self.xi_lo = -math.inf
        if pmf.unbounded_right:
            self.xi_star = self._edge_xi(pmf.g[-3:] if len(pmf) >= 3 else pmf.g)
        if pmf.unbounded_left:
            self.xi_lo = -self._edge_xi(pmf.g[:3][::-1] if len(pmf) >= 3 else pmf.g[::-1])
        self.mean = float(np.dot(self.ks, np.exp(self.logp)))
        self._check_monotone()

    def _edge_xi(self, g_edge):
        # g_edge runs toward the edge; -log r_edge = g(edge) - g(edge - 1).
        d = np.diff(g_edge)
        if len(d) >= 2 and abs(d[-1] - d[-2]) > 1e-6 * max(1.0, abs(d[-1])):
            self.edge_converged = False
            self.logger.warning("edge ratio not converged at truncation edge (%r vs %r)", d[-2], d[-1])
        return float(max(d[-1], 0.0))

    def _check_monotone(self):
        if len(self.ks) < 2:
            return
        lo = max(self.xi_lo, -2.0) * 0.9
        hi = min(self.xi_star, 2.0) * 0.9
        probes = np.linspace(lo, hi, 9)
        d = np.array([self._derivative(xi) for xi in probes])
        if not np.all(np.diff(d) > 0):
            self.logger.warning("Lambda' not strictly increasing on probes %r", probes)

    def in_domain(self, xi):
        return self.xi_lo + DOMAIN_EDGE_TOLERANCE < xi < self.xi_star - DOMAIN_EDGE_TOLERANCE

    def _log_mgf(self, xi):
        return float(logsumexp(self.logp + xi * self.ks))

    def _derivative(self, xi):
        return float(np.dot(self.ks, softmax(self.logp + xi * self.ks)))

    def log_mgf(self, xi):
        """Lambda(xi) of the truncated law; +inf off the conceptual domain."""
        if not self.in_domain(xi):
            return math.inf
        return self._log_mgf(xi)

    def derivative(self, xi):
        if not self.in_domain(xi):
            raise DomainError('xi', xi, "outside the MGF domain (%r, %r)" % (self.xi_lo, self.xi_star))
        return self._derivative(xi)

    def _endpoint(self, x):
        """Endpoint rule, or None for interior points."""
        hi, lo = float(self.pmf.hi), float(self.pmf.lo)
        if x > hi + ENDPOINT_TOLERANCE:
            if self.pmf.unbounded_right:
                raise TruncationError(x, hi)
            return LegendrePoint(math.inf, math.inf)
        if x < lo - ENDPOINT_TOLERANCE:
            if self.pmf.unbounded_left:
                raise TruncationError(x, lo)
            return LegendrePoint(math.inf, -math.inf)
        if abs(x - hi) <= ENDPOINT_TOLERANCE:
            if self.pmf.unbounded_right:
                self.logger.warning("Lambda*(%r) uses the endpoint rule of the truncated law", x)
            return LegendrePoint(-math.log(self.p_star), math.inf, self.pmf.unbounded_right)
        if abs(x - lo) <= ENDPOINT_TOLERANCE:
            if self.pmf.unbounded_left:
                self.logger.warning("Lambda*(%r) uses the endpoint rule of the truncated law", x)
            return LegendrePoint(-math.log(self.p_lo), -math.inf, self.pmf.unbounded_left)
        return None

    def solve(self, x):
        """Legendre point of x: Lambda*(x) and the xi solving Lambda'(xi) = x.

        flagged is set when the answer depends on the truncation, that is
        when xi falls outside the conceptual MGF domain.
        """
        x = float(x)
        end = self._endpoint(x)
        if end is not None:
            return end
        s = self.solver
        if abs(x - self.mean) <= s.tol_x:
            return LegendrePoint(0.0, 0.0)
        sign = 1.0 if x > self.mean else -1.0
        a, b = 0.0, sign
        for _ in range(64):
            if sign * (self._derivative(b) - x) >= 0:
                break
            a, b = b, 2 * b
        else:
            raise InvariantError("cannot bracket Lambda'(xi) = %r" % x)
        a, b = min(a, b), max(a, b)
        for _ in range(s.max_iter):
            mid = 0.5 * (a + b)
            if self._derivative(mid) < x:
                a = mid
            else:
                b = mid
            if b - a <= s.tol_xi * max(1.0, abs(b)):
                break
        xi = 0.5 * (a + b)
        value = max(x * xi - self._log_mgf(xi), 0.0)
        flagged = not self.in_domain(xi)
        if flagged:
            self.logger.warning("Lambda*(%r) depends on truncation (xi=%r beyond %r)", x, xi, self.xi_star)
        return LegendrePoint(value, xi, flagged)

    def cramer(self, x):
        return self.solve(x).value

    def cramer_values(self, xs):
        return np.array([self.cramer(x) for x in np.asarray(xs, dtype=float).ravel()])

_evaluators = measure_cache('cramer evaluators', 256)
_distributions = measure_cache('cramer distributions', 32)

def get_evaluator(pmf):
    """Shared CramerEvaluator1D for pmf."""
    return _evaluators.get_or_compute(pmf, (), CramerEvaluator1D, pmf)

def log_mgf(ev, xi):
    return ev.log_mgf(xi)

def cramer_1d(ev, x):
    if isinstance(ev, Pmf1D):
        ev = get_evaluator(ev)
    return ev.cramer(x)

def cramer_product(laws, x):
    """Lambda* of a product law: the sum of the factor transforms."""
    laws = as_product(laws)
    x = np.asarray(x, dtype=float).ravel()
    if len(x) != laws.n:
        raise DomainError('x', len(x), "expected a vector of length %d" % laws.n)
    total = 0.0
    for pmf, xi in zip(laws.factors, x):
        v = get_evaluator(pmf).cramer(xi)
        if math.isinf(v):
            return math.inf
        total += v
    return total

class ValueDistribution(object):
    """Law of a nonnegative random value as sorted (value, prob) atoms."""
    logger = log.get_logger('ValueDistribution')

    def __init__(self, values, probs, bin_merge_tol=1e-12, max_entries=10**6, binned=False,
                 bin_width=0.0):
        values, probs = merge_atoms(values, probs, bin_merge_tol)
        if abs(math.fsum(probs) - 1.0) > 1e-10:
            raise InvariantError("value distribution mass %r" % math.fsum(probs))
        self.values = np.maximum(values, 0.0)
        self.probs = probs
        self.bin_merge_tol = bin_merge_tol
        self.max_entries = max_entries
        self.binned = binned
        self.bin_width = bin_width

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return zip(self.values.tolist(), self.probs.tolist())

    def mean(self):
        return math.fsum(self.values * self.probs)

    def variance(self):
        m = self.mean()
        return math.fsum((self.values - m) ** 2 * self.probs)

    def moment(self, q):
        return math.fsum(self.values ** q * self.probs)

    def beta(self):
        """Var / mean^2."""
        m = self.mean()
        if m == 0:
            raise BetaUndefinedError("beta undefined: Lambda* has mean 0")
        return self.variance() / (m * m)

    def cdf(self, r):
        """P(value <= r)."""
        tol = self.bin_merge_tol * max(1.0, abs(r))
        return min(math.fsum(self.probs[self.values <= r + tol]), 1.0)

    def rows(self):
        return [(v, p) for v, p in self]

def factor_value_law(pmf):
    """Values Lambda*(k) over the support of pmf with their masses."""
    ev = get_evaluator(pmf)
    values = np.array([ev.cramer(k) for k in pmf.ks])
    return values, pmf.masses

def _binned_convolution(values, probs, fv, fp, nbins):
    lo = values[0] + fv.min()
    hi = values[-1] + fv.max()
    width = (hi - lo) / nbins if hi > lo else 1.0
    mass = np.zeros(nbins + 1)
    moment = np.zeros(nbins + 1)
    for v, p in zip(fv, fp):
        s = values + v
        idx = np.minimum(((s - lo) / width).astype(np.int64), nbins)
        w = probs * p
        mass += np.bincount(idx, weights=w, minlength=nbins + 1)
        moment += np.bincount(idx, weights=w * s, minlength=nbins + 1)
    keep = mass > 0
    return moment[keep] / mass[keep], mass[keep], width

@log.trace_function(module_logger)
def cramer_distribution(laws, max_entries=10**6, bin_merge_tol=1e-12):
    """Exact law of sum_i Lambda*_i(X_i) under a product measure.

    Built by iterated convolution of the per factor value laws. When the
    atom count would exceed max_entries the convolution falls back to fixed
    width bins and the result is flagged as binned.
    """
    laws = as_product(laws)
    return _distributions.get_or_compute(laws, (max_entries, bin_merge_tol), _convolve_value_laws, laws,
                                         max_entries, bin_merge_tol)

def _convolve_value_laws(laws, max_entries, bin_merge_tol):
    values = np.zeros(1)
    probs = np.ones(1)
    binned = False
    width = 0.0
    for pmf in laws.factors:
        fv, fp = factor_value_law(pmf)
        if len(values) * len(fv) > max_entries:
            values, probs, w = _binned_convolution(values, probs, fv, fp, max_entries - 1)
            binned = True
            width = max(width, w)
        else:
            values, probs = merge_atoms(np.add.outer(values, fv), np.multiply.outer(probs, fp),
                                        bin_merge_tol)
    if binned:
        module_logger.warning("Lambda* distribution binned at width %g", width)
    return ValueDistribution(values, probs, bin_merge_tol, max_entries, binned, width)

def lambda_star_moments(dist, q=1.0):
    """E[(Lambda*)^q]; dist also exposes mean, variance and beta."""
    if q < 1:
        raise DomainError('q', q, "moment order must be at least 1")
    return dist.moment(q)

class DiagnosticRow(NamedTuple):
    k: int
    S: float
    m: float
    g: float
    r: float
    m_ratio: float
    g_ratio: float
    lower: float
    upper: float
    sandwich_ok: bool

def _ratio(a, b):
    if b == 0 or math.isinf(a) or math.isinf(b):
        return math.nan
    return a / b

def survival_diagnostics(pmf, k_range=None):
    """Survival S(k) = P(Y >= k), m = -log S, ratio columns and the sandwich
    p(k)/(1 - r*) <= S(k) <= p(k)/(1 - r_k), checked row by row."""
    a, b = (pmf.lo, pmf.hi) if k_range is None else k_range
    if a < pmf.lo or b > pmf.hi or a > b:
        raise DomainError('k_range', (a, b), "outside stored support [%d, %d]" % (pmf.lo, pmf.hi))
    p = pmf.masses
    S = np.cumsum(p[::-1])[::-1]
    ratios = pmf.ratios()
    r_star = float(ratios[-1]) if pmf.unbounded_right and len(ratios) else 0.0
    slack = pmf.tail_mass + 1e-12
    rows = []
    for k in range(a, b + 1):
        i = k - pmf.lo
        s = float(min(S[i], 1.0))
        m = -math.log(s) if s < 1 else 0.0
        if i < len(ratios):
            r = float(ratios[i])
        else:
            r = r_star
        m_next = -math.log(min(S[i + 1], 1.0)) if i + 1 < len(S) else math.inf
        g_next = float(pmf.g[i + 1]) if i + 1 < len(p) else math.inf
        lower = p[i] / (1 - r_star)
        upper = p[i] / (1 - r) if r < 1 else math.inf
        ok = lower <= s * (1 + 1e-12) + slack and s <= upper * (1 + 1e-12) + slack
        rows.append(DiagnosticRow(k, s, m, float(pmf.g[i]), r, _ratio(m_next, m),
                                  _ratio(g_next, float(pmf.g[i])), float(lower), float(upper), ok))
    return rows

CLASSIFIER_CAVEAT = ("finite window heuristic: a limit cannot be decided from finitely many "
                     "terms, adversarial tails can be mislabelled")

class ConditionVerdict(NamedTuple):
    verdict: str
    limit_estimate: float
    evidence: list
    caveat: str = CLASSIFIER_CAVEAT

def _aitken(r):
    if len(r) < 3:
        return float(r[-1])
    d1 = r[-2] - r[-3]
    d2 = r[-1] - r[-2]
    if d2 - d1 == 0:
        return float(r[-1])
    return float(r[-1] - d2 * d2 / (d2 - d1))

def lambda_star_condition_classify(pmf, k_probe=None, trend_tol=0.05, window=20):
    """Classify the tail of an unbounded-right law by the ratios g(k+1)/g(k).

    The ratios are taken for k in [k_probe - window, k_probe - 1], clipped
    to k >= max(lo, 0). The limit is estimated by Aitken extrapolation of
    the last three ratios.
    """
    if not pmf.unbounded_right:
        raise NotApplicableError("the condition concerns laws unbounded to the right")
    if k_probe is None:
        k_probe = pmf.hi
    if k_probe > pmf.hi:
        raise DomainError('k_probe', k_probe, "beyond truncation edge %d" % pmf.hi)
    start = max(k_probe - window, pmf.lo, 0)
    ks = np.arange(start, k_probe)
    g = pmf.log_mass(np.arange(start, k_probe + 1))
    ratios = g[1:] / g[:-1] if len(ks) else np.zeros(0)
    evidence = [(int(k), float(g0), float(g1), float(r)) for k, g0, g1, r in zip(ks, g[:-1], g[1:], ratios)]
    if len(ratios) < 2 or not np.all(np.isfinite(ratios)):
        return ConditionVerdict('inconclusive', math.nan, evidence)
    dev = ratios - 1
    limit = _aitken(ratios)
    approaching = np.all(np.diff(np.abs(dev)) <= 1e-12)
    if abs(limit - 1) <= trend_tol and abs(dev[-1]) <= trend_tol and approaching:
        verdict = 'satisfied'
    elif np.all(np.abs(dev) > trend_tol) and (np.all(dev > 0) or np.all(dev < 0)) \
            and abs(limit - 1) > trend_tol:
        verdict = 'violated'
    else:
        verdict = 'inconclusive'
    return ConditionVerdict(verdict, limit, evidence)

class CramerBracket(NamedTuple):
    lower: float
    upper: float
    t: float

def directional_lower_bound(points, log_probs, x, direction, ts):
    """<t theta, x> - Lambda(t theta) for each t in ts.

    Every value is a certified lower bound on Lambda*(x) since Lambda* is a
    supremum. gaps = <theta, X_i - x> is formed before scaling by t.
    """
    gaps = (np.asarray(points, dtype=float) - np.asarray(x, dtype=float)) @ np.asarray(direction, dtype=float)
    return directional_lower_bound_from_gaps(gaps, log_probs, ts)

def directional_lower_bound_from_gaps(gaps, log_probs, ts):
    ts = np.asarray(ts, dtype=float)
    out = np.empty(len(ts))
    for i, t in enumerate(ts):
        out[i] = -logsumexp(log_probs + t * gaps)
    return out

def atomic_cramer_bracket(law, x, direction=None, t_max=64.0, n_grid=256):
    """Certified bracket on Lambda*(x) for a finite atomic law.

    The lower end maximizes the directional bound over a t grid; the upper
    end is -log mu({x}), valid at atoms, and +inf elsewhere.
    """
    if isinstance(law, LatticeBallLaw):
        law = law.to_atomic()
    if not isinstance(law, FiniteAtomicLaw):
        raise NotApplicableError("atomic bracket needs a finite atomic law")
    x = np.asarray(x, dtype=float).ravel()
    mass = law.mass_of(x)
    upper = -math.log(mass) if mass > 0 else math.inf
    mean = law.mean()
    if np.max(np.abs(x - mean)) <= ENDPOINT_TOLERANCE:
        return CramerBracket(0.0, 0.0, 0.0)
    if direction is None:
        direction = (x - mean) / np.linalg.norm(x - mean)
    ts = np.concatenate(([0.0], np.geomspace(1e-3, t_max, n_grid)))
    values = directional_lower_bound(law.points, np.log(law.probs), x, direction, ts)
    i = int(np.argmax(values))
    lower = max(float(values[i]), 0.0)
    return CramerBracket(lower, max(upper, lower), float(ts[i]))

def cramer_distribution_atomic(law, tol=1e-8, t_max=64.0):
    """Law of Lambda*(X) for a finite atomic law whose atoms admit tight
    brackets, such as the uniform law on the cross-polytope lattice points."""
    if isinstance(law, LatticeBallLaw):
        law = law.to_atomic()
    values = np.empty(len(law))
    for i, point in enumerate(law.points):
        b = atomic_cramer_bracket(law, point, t_max=t_max)
        if b.upper - b.lower > tol:
            raise NotApplicableError("bracket at atom %r is [%r, %r], wider than %g"
                                     % (tuple(point), b.lower, b.upper, tol))
        values[i] = b.lower
    return ValueDistribution(values, law.probs)

class CramerEvalAction(Action):
    action_name = 'cramer-eval'
    tooltip = 'Evaluate Lambda* at a point, or tabulate the law of Lambda*(X).'

    def get_options(self):
        return [FileOption('measure', required=True, tooltip='Measure JSON file.'),
                FloatListOption('x', tooltip='Comma separated coordinates of the evaluation point.'),
                BooleanOption('distribution', tooltip='Tabulate the law of Lambda*(X) as value,prob rows.')]

    def run(self):
        measure = read_measure(self.params['measure'])
        x = self.params.get('x')
        if x is None and not self.params.get('distribution'):
            raise OptionError('--x', '', 'give an evaluation point or --distribution')
        if self.params.get('distribution'):
            return self.tabulate(measure)
        return self.evaluate(measure, x)

    def evaluate(self, measure, x):
        columns = ['x_%d' % (i + 1) for i in range(len(x))]
        if isinstance(measure, (Pmf1D, ProductLaw)):
            return columns + ['lambda_star'], [list(x) + [cramer_product(measure, x)]]
        bracket = atomic_cramer_bracket(measure, x)
        if bracket.upper > bracket.lower:
            self.flag('bracket')
        return columns + ['lower', 'upper', 't'], [list(x) + list(bracket)]

    def tabulate(self, measure):
        if isinstance(measure, (Pmf1D, ProductLaw)):
            dist = cramer_distribution(measure)
        else:
            dist = cramer_distribution_atomic(measure)
        if dist.binned:
            self.flag('binned')
            self.add_metadata('bin_width', dist.bin_width)
        self.add_metadata('mean', dist.mean())
        self.add_metadata('variance', dist.variance())
        try:
            self.add_metadata('beta', dist.beta())
        except BetaUndefinedError:
            self.add_metadata('beta', 'undefined')
        return ['value', 'prob'], dist.rows()

register_action(CramerEvalAction)
