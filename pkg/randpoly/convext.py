"""Convex extensions of g = -log p for log-concave integer laws and their
products, with integrability and moment probes."""

import itertools
import math
from typing import NamedTuple

import numpy as np

from . import log
from .action import Action, register_action
from .cache import measure_cache
from .measures import (CapacityError,
                       DomainError,
                       FiniteAtomicLaw,
                       Pmf1D,
                       ProductLaw,
                       ENUMERATION_CAP,
                       read_measure,
                       validate_log_concave)
from .options import FileOption, FloatListOption, FloatOption

module_logger = log.get_module_logger(__file__)

class ExtensionError(ValueError):
    def __init__(self, reason, witness=None):
        ValueError.__init__(self, reason, witness)
        self.reason = reason
        self.witness = witness

    def __str__(self):
        if self.witness is None:
            return self.reason
        return "%s (at %r)" % (self.reason, self.witness)

class PiecewiseLinearExtension(object):
    """g~ on [lo, hi]: linear interpolation of g between consecutive integers,
    +inf outside the stored support."""
    def __init__(self, base):
        self.base = base
        self.breakpoints = base.ks
        self.values = base.g
        self.slopes = np.diff(base.g)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.breakpoints[0]) & (x <= self.breakpoints[-1])
        if len(self.values) == 1:
            return np.where(inside, self.values[0], np.inf)
        return np.where(inside, np.interp(x, self.breakpoints, self.values), np.inf)

    def f(self, x):
        """The log-concave extension e^{-g~}."""
        return np.exp(-self.evaluate(x))

def extend_1d(pmf):
    report = validate_log_concave(pmf)
    if not report.is_log_concave:
        raise ExtensionError("pmf is not log-concave, the interpolant would not be convex",
                             report.first_violation)
    return PiecewiseLinearExtension(pmf)

class IntegralReport(NamedTuple):
    value: float
    pieces: np.ndarray

def integral_extension_1d(ext):
    """Integral of e^{-g~}, in closed form on every affine piece.

    On [k, k+1] with slope s the piece integrates to p(k)(1 - e^{-s})/s.
    """
    g = ext.values
    if len(g) < 2:
        return IntegralReport(0.0, np.zeros(0))
    s = np.diff(g)
    p = np.exp(-g[:-1])
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    pieces = np.where(small, p * (1 - s / 2), p * -np.expm1(-safe) / safe)
    return IntegralReport(math.fsum(pieces), pieces)

_extensions = measure_cache('convex extensions', 256)

def get_extension(pmf):
    return _extensions.get_or_compute(pmf, (), extend_1d, pmf)

def product_extension_eval(laws, x):
    """g~(x) = sum_i g~_i(x_i) for a product of log-concave factors."""
    if isinstance(laws, Pmf1D):
        laws = ProductLaw([laws])
    if not isinstance(laws, ProductLaw):
        raise ExtensionError("convex extensions are only computed for 1D laws and products")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != laws.n:
        raise DomainError('x', x.shape, "expected dimension %d" % laws.n)
    return sum(get_extension(f).evaluate(x[..., i]) for i, f in enumerate(laws.factors))

def _window_bounds(window, n):
    window = np.asarray(window, dtype=int)
    if window.ndim == 1:
        window = np.tile(window, (n, 1))
    if window.shape != (n, 2) or np.any(window[:, 1] < window[:, 0]):
        raise DomainError('window', window.tolist(), "need one (lo, hi) pair per coordinate")
    return window

def restriction_construct(F_eval, n, window, tail_certificate=0.0, epsilon_tail=1e-12,
                          spot_checks=200, seed=0, tol=1e-12):
    """Normalized restriction of a log-concave function F to the lattice
    points of an integer box.

    Log-concavity is spot checked on random midpoint triples, the mass
    outside the box is taken from the caller's tail certificate.
    """
    if tail_certificate >= epsilon_tail:
        raise ExtensionError("tail certificate %g does not beat epsilon_tail %g" % (tail_certificate, epsilon_tail))
    window = _window_bounds(window, n)
    size = math.prod(int(hi - lo + 1) for lo, hi in window)
    if size > ENUMERATION_CAP:
        raise CapacityError("restriction window", size, ENUMERATION_CAP)
    axes = [np.arange(lo, hi + 1) for lo, hi in window]
    points = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, n)
    values = np.array([float(F_eval(p)) for p in points])
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ExtensionError("F must be finite and nonnegative on the window")
    rng = np.random.default_rng(seed)
    for _ in range(spot_checks):
        i, j = rng.integers(len(points), size=2)
        a, b = points[i], points[j]
        mid = (a + b) / 2
        fm = float(F_eval(mid))
        if fm * fm < values[i] * values[j] - tol:
            raise ExtensionError("F fails midpoint log-concavity", (tuple(a), tuple(mid), tuple(b)))
    positive = values > 0
    if not np.any(positive):
        raise ExtensionError("F vanishes on the window")
    total = math.fsum(values[positive])
    if n == 1:
        idx = np.nonzero(positive)[0]
        if idx[-1] - idx[0] + 1 != len(idx):
            raise ExtensionError("restriction has interior zeros", int(points[idx[0], 0]))
        logw = np.log(values[idx[0]:idx[-1] + 1] / total)
        lo = int(points[idx[0], 0])
        hi = int(points[idx[-1], 0])
        symmetric = lo == -hi and np.allclose(logw, logw[::-1], rtol=0, atol=1e-12)
        return ProductLaw([Pmf1D(lo, logw, symmetric=symmetric, tail_mass=tail_certificate)])
    return FiniteAtomicLaw(points[positive], values[positive] / total)

class MomentProbe(NamedTuple):
    rows: list
    A: float
    B: float
    certified: bool
    tail_bound: float

def _envelope_tail(A, B, q, n, R, max_terms=10**7):
    """Bound on sum_{|k| > R} g~^q e^{-g~} assuming g~(k) >= B|k| - log A.

    Points with j < |k| <= j + 1 number at most (2j + 3)^n. Returns inf
    when the bounding series has not decayed within max_terms terms.
    """
    log_a = math.log(A)
    log_peak = q * math.log(q) - q
    start = int(math.floor(R))
    span = 1024
    while span <= max_terms:
        j = np.arange(start, start + span, dtype=float)
        u = B * j - log_a
        log_phi = np.where(u >= q, q * np.log(np.maximum(u, 1e-300)) - u, log_peak)
        log_terms = n * np.log(2 * j + 3) + log_phi
        if log_terms[-1] < -745 and log_terms[-1] < log_terms[-2]:
            return math.fsum(np.exp(log_terms))
        span *= 2
    return math.inf

def moment_finiteness_probe(laws, q=1.0, radii=(10, 20, 50, 100, 200), cap=ENUMERATION_CAP):
    """Partial sums of sum_{|k| <= R} g~(k)^q e^{-g~(k)} over the radii, with
    an exponential envelope fitted on the outer probed shell."""
    if isinstance(laws, Pmf1D):
        laws = ProductLaw([laws])
    if not isinstance(laws, ProductLaw):
        raise ExtensionError("moment probe needs a product of log-concave laws")
    if q < 1:
        raise DomainError('q', q, "moment order must be at least 1")
    for f in laws.factors:
        get_extension(f)
    if laws.support_size > cap:
        raise CapacityError("moment probe lattice", laws.support_size, cap)
    radii = np.asarray(radii, dtype=float)
    grids = np.meshgrid(*[f.ks for f in laws.factors], indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    gt = laws.log_mass(points)
    terms = gt ** q * np.exp(-gt)
    norms = np.linalg.norm(points, axis=1)
    order = np.argsort(norms, kind='stable')
    sums = np.cumsum(terms[order])
    counts = np.searchsorted(norms[order], radii, side='right')
    rows = [(float(R), float(sums[c - 1]) if c else 0.0) for R, c in zip(radii, counts)]
    R_max = min(float(radii[-1]), float(norms.max()))
    shell = (norms >= R_max / 2) & (norms <= R_max)
    A = B = math.nan
    certified = False
    tail_bound = math.inf
    if len(radii) > 1 and len(np.unique(norms[shell])) >= 2:
        B, _ = np.polyfit(norms[shell], gt[shell], 1)
        if B > 0 and np.isfinite(B):
            c = float(np.min(gt[shell] - B * norms[shell]))
            A = math.exp(-c)
            tail_bound = _envelope_tail(A, float(B), q, laws.n, float(radii[-1]))
            certified = bool(np.isfinite(tail_bound))
    if not certified:
        module_logger.warning("envelope fit failed, moment probe is uncertified")
    return MomentProbe(rows, float(A), float(B), certified, tail_bound)

class ExtensionCheckAction(Action):
    action_name = 'extension-check'
    tooltip = 'Check log-concavity, integrate the convex extension and probe moments of Lambda*.'

    def get_options(self):
        return [FileOption('measure', required=True, tooltip='Measure JSON file (a pmf or a product).'),
                FloatOption('q', minimum=1, default=1.0, tooltip='Moment order, at least 1.'),
                FloatListOption('radii', minimum=0, default=[10.0, 20.0, 50.0, 100.0, 200.0],
                                tooltip='Comma separated probe radii.')]

    def run(self):
        measure = read_measure(self.params['measure'])
        if isinstance(measure, Pmf1D):
            measure = ProductLaw([measure])
        if not isinstance(measure, ProductLaw):
            raise ExtensionError("extension check needs a pmf or a product law")
        log_concave = True
        for i, f in enumerate(measure.factors):
            report = validate_log_concave(f)
            if not report.is_log_concave:
                self.add_metadata('log_concave', False)
                self.add_metadata('first_violation', 'factor %d at k=%s' % (i, report.first_violation))
                log_concave = False
                break
        if not log_concave:
            return ['R', 'partial_sum'], []
        self.add_metadata('log_concave', True)
        for i, f in enumerate(measure.factors):
            if i and f.digest == measure.factors[0].digest:
                continue
            self.add_metadata('integral_%d' % i, integral_extension_1d(get_extension(f)).value)
        probe = moment_finiteness_probe(measure, self.params['q'], sorted(self.params['radii']))
        for key in ('A', 'B', 'certified', 'tail_bound'):
            self.add_metadata(key, getattr(probe, key))
        if not probe.certified:
            self.flag('uncertified')
        return ['R', 'partial_sum'], probe.rows

register_action(ExtensionCheckAction)
