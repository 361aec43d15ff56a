"""Atomic probability measures: integer p.m.f.s, products, explicit atom lists
and uniform laws on lattice p-balls.

All measure objects are immutable after construction and validate their
invariants when built, including when they are read back from JSON.
"""

import functools
import hashlib
import json
import math
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from . import log

module_logger = log.get_module_logger(__file__)

MASS_TOLERANCE = 1e-12
LOG_CONCAVITY_TOLERANCE = 1e-14
GUARD_BAND = 1e-9
ENUMERATION_CAP = 10**7

class DomainError(ValueError):
    def __init__(self, name, value, reason):
        ValueError.__init__(self, name, value, reason)
        self.name = name
        self.value = value
        self.reason = reason

    def __str__(self):
        return "bad %s %r: %s" % (self.name, self.value, self.reason)

class ValidationError(ValueError):
    pass

class CapacityError(RuntimeError):
    def __init__(self, what, estimate, cap):
        RuntimeError.__init__(self, what, estimate, cap)
        self.what = what
        self.estimate = estimate
        self.cap = cap

    def __str__(self):
        return "%s: estimated size %s exceeds cap %s" % (self.what, self.estimate, self.cap)

class InvariantError(AssertionError):
    pass

class TailPolicy(NamedTuple):
    epsilon_tail: float = 1e-12
    hard_cap: int = 10**6

DEFAULT_TAIL_POLICY = TailPolicy()

def _format_real(x):
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    return format(float(x), '.17g')

class Pmf1D(object):
    """Probability mass function on a contiguous integer interval.

    Masses are stored as g(k) = -log p(k) for k = lo..hi. k_min and k_max are
    the conceptual support endpoints, which are infinite for laws that were
    truncated from an unbounded support; tail_mass then bounds the mass that
    truncation removed.
    """
    logger = log.get_logger('Pmf1D')

    def __init__(self, lo, log_weights, k_min=None, k_max=None, symmetric=False,
                 tail_policy=None, tail_mass=0.0):
        w = np.asarray(log_weights, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ValidationError("pmf needs a nonempty one dimensional mass vector")
        if not np.all(np.isfinite(w)):
            raise ValidationError("support must be contiguous (zero or non-finite mass inside [%d, %d])" % (lo, lo + len(w) - 1))
        self.lo = int(lo)
        self.hi = self.lo + len(w) - 1
        self.g = logsumexp(w) - w
        self.g.setflags(write=False)
        self.k_min = self.lo if k_min is None else k_min
        self.k_max = self.hi if k_max is None else k_max
        if self.k_min > self.lo or self.k_max < self.hi:
            raise ValidationError("stored range [%d, %d] exceeds declared support" % (self.lo, self.hi))
        self.tail_policy = tail_policy or DEFAULT_TAIL_POLICY
        self.tail_mass = float(tail_mass)
        self.symmetric = bool(symmetric)
        total = math.fsum(np.exp(-self.g))
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValidationError("masses sum to %r" % total)
        if self.symmetric:
            if self.lo != -self.hi or not np.allclose(self.g, self.g[::-1], rtol=0, atol=1e-12):
                raise ValidationError("pmf flagged symmetric but p(k) != p(-k)")
        self._digest = None

    def __len__(self):
        return len(self.g)

    def __repr__(self):
        return "<Pmf1D [%d, %d] of %d atoms>" % (self.lo, self.hi, len(self))

    def __eq__(self, other):
        return isinstance(other, Pmf1D) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)

    @property
    def ks(self):
        return np.arange(self.lo, self.hi + 1)

    @property
    def masses(self):
        return np.exp(-self.g)

    @property
    def unbounded_left(self):
        return math.isinf(self.k_min)

    @property
    def unbounded_right(self):
        return math.isinf(self.k_max)

    @property
    def truncated(self):
        return self.unbounded_left or self.unbounded_right

    @property
    def x_star(self):
        return float(self.k_max)

    @property
    def p_star(self):
        """Mass at the right endpoint of the stored support."""
        return math.exp(-self.g[-1])

    @property
    def largest_atom(self):
        return math.exp(-self.g.min())

    @property
    def digest(self):
        if self._digest is None:
            h = hashlib.sha256()
            h.update(repr((self.lo, self.k_min, self.k_max, self.symmetric)).encode())
            h.update(self.g.tobytes())
            self._digest = h.hexdigest()
        return self._digest

    def log_mass(self, k):
        """g(k) = -log p(k); +inf off the stored support."""
        k = np.asarray(k)
        inside = (k >= self.lo) & (k <= self.hi)
        idx = np.clip(k - self.lo, 0, len(self.g) - 1).astype(int)
        return np.where(inside, self.g[idx], np.inf)

    def mass(self, k):
        return np.exp(-self.log_mass(k))

    def mean(self):
        return float(np.dot(self.ks, self.masses))

    def survival(self, x):
        """P(Y >= x) by exact partial sums."""
        m = self.masses
        return math.fsum(m[self.ks >= x - MASS_TOLERANCE])

    def cdf(self, x):
        """P(Y <= x) by exact partial sums."""
        m = self.masses
        return math.fsum(m[self.ks <= x + MASS_TOLERANCE])

    def ratios(self):
        """r_k = p(k+1)/p(k) for k = lo..hi-1."""
        return np.exp(self.g[:-1] - self.g[1:])

    def to_json(self):
        return {'type': 'pmf1d',
                'k_min': self.lo,
                'support': [_format_real(self.k_min) if math.isinf(self.k_min) else int(self.k_min),
                            _format_real(self.k_max) if math.isinf(self.k_max) else int(self.k_max)],
                'log_mass': [_format_real(x) for x in self.g],
                'symmetric': self.symmetric,
                'tail_mass': _format_real(self.tail_mass)}

class ProductLaw(object):
    """mu = lambda_1 x ... x lambda_n for Pmf1D factors."""
    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise ValidationError("product law needs at least one factor")
        for f in factors:
            if not isinstance(f, Pmf1D):
                raise ValidationError("product factors must be Pmf1D, got %r" % type(f).__name__)
        self.factors = factors
        self.n = len(factors)
        self._digest = None

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.factors)

    def __repr__(self):
        return "<ProductLaw n=%d>" % self.n

    @property
    def digest(self):
        if self._digest is None:
            self._digest = hashlib.sha256(''.join(f.digest for f in self.factors).encode()).hexdigest()
        return self._digest

    @property
    def identical(self):
        first = self.factors[0].digest
        return all(f.digest == first for f in self.factors)

    @property
    def support_size(self):
        return math.prod(len(f) for f in self.factors)

    @property
    def largest_atom(self):
        return max(f.largest_atom for f in self.factors)

    def mean(self):
        return np.array([f.mean() for f in self.factors])

    def is_binary(self):
        """True if every factor lives on {0, 1}."""
        return all(f.lo == 0 and f.hi == 1 for f in self.factors)

    def log_mass(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise DomainError('x', x.shape, "expected dimension %d" % self.n)
        return sum(f.log_mass(x[..., i]) for i, f in enumerate(self.factors))

    def to_json(self):
        if self.n > 1 and self.identical:
            return {'type': 'product', 'factors': [self.factors[0].to_json()], 'repeat': self.n}
        return {'type': 'product', 'factors': [f.to_json() for f in self.factors]}

class FiniteAtomicLaw(object):
    """Explicit list of atoms in R^n with positive probabilities."""
    def __init__(self, points, probs, full_dimensional=False):
        points = np.array(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        probs = np.array(probs, dtype=float)
        if points.ndim != 2 or len(points) == 0 or len(points) != len(probs):
            raise ValidationError("need matching nonempty point and probability lists")
        if np.any(probs <= 0) or not np.all(np.isfinite(points)):
            raise ValidationError("atom probabilities must be positive and points finite")
        total = math.fsum(probs)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValidationError("probabilities sum to %r" % total)
        if len(np.unique(points, axis=0)) != len(points):
            raise ValidationError("atoms must be pairwise distinct")
        self.points = points
        self.probs = probs
        self.points.setflags(write=False)
        self.probs.setflags(write=False)
        self.n = points.shape[1]
        self.full_dimensional = bool(full_dimensional)
        if self.full_dimensional and np.linalg.matrix_rank(points - points[0]) < self.n:
            raise ValidationError("atoms flagged full dimensional span a proper affine subspace")
        self._index = None
        self._digest = None

    @classmethod
    def from_weights(cls, points, weights, full_dimensional=False):
        weights = np.asarray(weights, dtype=float)
        return cls(points, weights / math.fsum(weights), full_dimensional)

    def __len__(self):
        return len(self.probs)

    def __repr__(self):
        return "<FiniteAtomicLaw n=%d atoms=%d>" % (self.n, len(self))

    @property
    def digest(self):
        if self._digest is None:
            h = hashlib.sha256(self.points.tobytes())
            h.update(self.probs.tobytes())
            self._digest = h.hexdigest()
        return self._digest

    @property
    def largest_atom(self):
        return float(self.probs.max())

    def mean(self):
        return self.probs @ self.points

    def index_of(self, x):
        """Index of the atom equal to x, or None."""
        if self._index is None:
            self._index = dict((tuple(p), i) for i, p in enumerate(self.points.tolist()))
        return self._index.get(tuple(float(v) for v in x))

    def mass_of(self, x):
        i = self.index_of(x)
        return 0.0 if i is None else float(self.probs[i])

    def to_json(self):
        return {'type': 'finite_atomic',
                'points': [[_format_real(v) for v in p] for p in self.points],
                'probs': [_format_real(v) for v in self.probs],
                'full_dimensional': self.full_dimensional}

class LatticeBallLaw(object):
    """Uniform law on L_n = Z^n intersected with the closed radius r l_p ball.

    When p is an integer the lattice sums sum |x_i|^p are integers and are
    compared with floor(r^p) exactly. Otherwise the comparison is done in
    floating point with a guard band of GUARD_BAND and inexact is set.
    """
    logger = log.get_logger('LatticeBallLaw')

    def __init__(self, n, r, p, enumeration_cap=ENUMERATION_CAP):
        if int(n) != n or n < 1:
            raise DomainError('n', n, "dimension must be a positive integer")
        if not r >= 1:
            raise DomainError('r', r, "radius must be at least 1")
        if not p >= 1:
            raise DomainError('p', p, "exponent must be at least 1")
        self.n = int(n)
        self.r = float(r)
        self.p = float(p)
        self.enumeration_cap = enumeration_cap
        rp = self.r ** self.p
        self.integer_p = self.p == int(self.p)
        if self.integer_p:
            self.radius_pow = int(math.floor(rp + GUARD_BAND))
            self.inexact = False
        else:
            self.radius_pow = rp
            self.inexact = True
            self.logger.warning("non-integer p=%g: ball membership uses a %g guard band", self.p, GUARD_BAND)
        self.k = int(math.floor(rp + GUARD_BAND))
        # Largest coordinate magnitude allowed in the ball.
        self.max_coordinate = int(math.floor(rp ** (1.0 / self.p) + GUARD_BAND))
        self._points = None

    def __repr__(self):
        return "<LatticeBallLaw n=%d r=%g p=%g>" % (self.n, self.r, self.p)

    @property
    def is_cross_polytope(self):
        return self.k == 1

    @property
    def digest(self):
        return hashlib.sha256(repr(('lattice_ball', self.n, self.r, self.p)).encode()).hexdigest()

    def cost(self, v):
        """|v|^p, exact for integer p."""
        if self.integer_p:
            return abs(int(v)) ** int(self.p)
        return abs(float(v)) ** self.p

    def fits(self, cost, budget):
        if self.integer_p:
            return cost <= budget
        return cost <= budget + GUARD_BAND

    def contains(self, x):
        return self.fits(sum(self.cost(v) for v in x), self.radius_pow)

    def count(self):
        """Exact M_n without enumerating."""
        return count_lattice_ball(self)

    @property
    def points(self):
        if self._points is None:
            self._points = lattice_ball_enumerate(self)
        return self._points

    @property
    def M(self):
        if self._points is not None:
            return len(self._points)
        return self.count()

    def to_atomic(self):
        points = self.points
        return FiniteAtomicLaw(points, np.full(len(points), 1.0 / len(points)))

    def to_json(self):
        return {'type': 'lattice_ball', 'n': self.n, 'r': self.r, 'p': self.p}

def count_lattice_ball(law):
    costs = [(v, law.cost(v)) for v in range(-law.max_coordinate, law.max_coordinate + 1)]

    @functools.lru_cache(maxsize=None)
    def count(j, budget):
        if j == 0:
            return 1
        return sum(count(j - 1, budget - c) for v, c in costs if law.fits(c, budget))
    return count(law.n, law.radius_pow)

def lattice_ball_enumerate(law):
    """All integer points of the ball, each once, in lexicographic order."""
    estimate = count_lattice_ball(law)
    if estimate > law.enumeration_cap:
        raise CapacityError("lattice ball enumeration (n=%d, r=%g, p=%g)" % (law.n, law.r, law.p),
                            estimate, law.enumeration_cap)
    values = np.arange(-law.max_coordinate, law.max_coordinate + 1)
    if law.integer_p:
        costs = np.abs(values) ** int(law.p)
        prefixes = np.zeros((1, 0), dtype=np.int64)
        remaining = np.array([law.radius_pow], dtype=np.int64)
        slack = 0
    else:
        costs = np.abs(values).astype(float) ** law.p
        prefixes = np.zeros((1, 0), dtype=np.int64)
        remaining = np.array([law.radius_pow], dtype=float)
        slack = GUARD_BAND
    for _ in range(law.n):
        blocks = []
        budgets = []
        for v, c in zip(values, costs):
            sel = remaining - c >= -slack
            if not np.any(sel):
                continue
            block = np.empty((int(sel.sum()), prefixes.shape[1] + 1), dtype=np.int64)
            block[:, :-1] = prefixes[sel]
            block[:, -1] = v
            blocks.append(block)
            budgets.append(remaining[sel] - c)
        prefixes = np.concatenate(blocks)
        remaining = np.concatenate(budgets)
    order = np.lexsort(prefixes.T[::-1])
    points = prefixes[order]
    if len(points) != estimate:
        raise InvariantError("enumerated %d lattice points, counted %d" % (len(points), estimate))
    points.setflags(write=False)
    return points

def make_bernoulli(p):
    if not 0 < p < 1:
        raise DomainError('p', p, "must lie in (0, 1)")
    return Pmf1D(0, [math.log1p(-p), math.log(p)])

def make_from_masses(masses, k_min=0, symmetric=False):
    """Pmf1D from masses at k_min, k_min + 1, ...; zero masses at either end
    are dropped, zeros between positive masses are an error."""
    masses = np.asarray(masses, dtype=float)
    if not np.all(np.isfinite(masses)):
        raise ValidationError("masses must be finite")
    if np.any(masses < 0):
        raise ValidationError("negative mass")
    positive = np.nonzero(masses > 0)[0]
    if not len(positive):
        raise ValidationError("all masses are zero")
    first, last = positive[0], positive[-1]
    masses = masses[first:last + 1]
    if len(positive) < len(masses):
        hole = int(k_min + first + np.nonzero(masses == 0)[0][0])
        raise ValidationError("zero mass at k=%d inside the support, which must be contiguous" % hole)
    return Pmf1D(k_min + first, np.log(masses / math.fsum(masses)), symmetric=symmetric)

def make_uniform(a, b):
    if int(a) != a or int(b) != b or b < a:
        raise DomainError('interval', (a, b), "need integers a <= b")
    return Pmf1D(int(a), np.zeros(int(b) - int(a) + 1))

def _edge_tail(w, i, step):
    """Bound on the relative mass beyond index i going in direction step.

    Uses p(K) r/(1-r) with r the edge ratio, valid for non-increasing ratios.
    Returns None when the edge ratio is not below 1.
    """
    if np.isneginf(w[i]):
        return 0.0
    r = math.exp(w[i] - w[i - step])
    if r >= 1:
        return None
    return math.exp(w[i]) * r / (1 - r)

def make_from_log_weights(log_weight, k_min=-math.inf, k_max=math.inf, tail_policy=None,
                          symmetric=False, anchor=0):
    """Truncate the law p(k) proportional to exp(log_weight(k)).

    log_weight must accept integer arrays. Unbounded sides are grown from
    anchor until the certified tail bound drops below epsilon_tail, then cut
    back to the shortest range whose removed mass stays below it.
    """
    policy = tail_policy or DEFAULT_TAIL_POLICY
    anchor = int(min(max(anchor, k_min), k_max))
    half = 16
    while True:
        a = k_min if not math.isinf(k_min) else anchor - half
        b = k_max if not math.isinf(k_max) else anchor + half
        a, b = int(a), int(b)
        if b - a + 1 > policy.hard_cap:
            raise CapacityError("truncation of unbounded support", b - a + 1, policy.hard_cap)
        ks = np.arange(a, b + 1)
        with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
            w = np.asarray(log_weight(ks), dtype=float)
        w = np.where(np.isnan(w), -np.inf, w)
        top = w.max()
        if not np.isfinite(top):
            raise ValidationError("log weights are not finite near %d" % anchor)
        w = w - top
        mass = np.exp(w)
        total = math.fsum(mass)
        tails = [0.0, 0.0]
        grow = False
        if math.isinf(k_min):
            t = _edge_tail(w, 0, -1)
            grow = grow or t is None
            tails[0] = (t or 0.0) / total
        if math.isinf(k_max):
            t = _edge_tail(w, len(w) - 1, 1)
            grow = grow or t is None
            tails[1] = (t or 0.0) / total
        if not grow and sum(tails) < policy.epsilon_tail / 4:
            break
        half *= 2
    p = mass / total
    budget = policy.epsilon_tail / 2
    lo_i, hi_i = 0, len(p) - 1
    if math.isinf(k_min):
        removed = np.cumsum(p) + tails[0]
        lo_i = int(np.searchsorted(removed, budget, side='left'))
    if math.isinf(k_max):
        removed = np.cumsum(p[::-1]) + tails[1]
        hi_i = len(p) - 1 - int(np.searchsorted(removed, budget, side='left'))
    # Drop underflowed ends.
    while lo_i < hi_i and np.isneginf(w[lo_i]):
        lo_i += 1
    while hi_i > lo_i and np.isneginf(w[hi_i]):
        hi_i -= 1
    if symmetric:
        reach = max(ks[hi_i], -ks[lo_i])
        lo_i = int(np.searchsorted(ks, -reach))
        hi_i = int(np.searchsorted(ks, reach))
    tail_mass = math.fsum(p[:lo_i]) + math.fsum(p[hi_i + 1:]) + sum(tails)
    return Pmf1D(int(ks[lo_i]), w[lo_i:hi_i + 1], k_min=k_min, k_max=k_max, symmetric=symmetric,
                 tail_policy=policy, tail_mass=tail_mass)

def make_symmetric_geometric(q, tail_policy=None):
    if not 0 < q < 1:
        raise DomainError('q', q, "must lie in (0, 1)")
    log_q = math.log(q)
    return make_from_log_weights(lambda k: np.abs(k) * log_q, tail_policy=tail_policy, symmetric=True)

def make_product(pmf, n):
    return ProductLaw([pmf] * int(n))

def make_cube(n):
    """Uniform law on the vertices of {0, 1}^n."""
    return make_product(make_bernoulli(0.5), n)

def make_cross_polytope_law(n):
    return LatticeBallLaw(n, 1, 1)

class LogConcavityReport(NamedTuple):
    is_log_concave: bool
    first_violation: object = None

def validate_log_concave(pmf):
    """Check p(k)^2 >= p(k-1) p(k+1) at every interior k, up to an absolute
    LOG_CONCAVITY_TOLERANCE on the masses."""
    if len(pmf.g) < 3:
        return LogConcavityReport(True, None)
    p = np.exp(-pmf.g)
    excess = p[:-2] * p[2:] - p[1:-1] ** 2
    bad = np.nonzero(excess > LOG_CONCAVITY_TOLERANCE)[0]
    if len(bad):
        return LogConcavityReport(False, int(pmf.lo + 1 + bad[0]))
    return LogConcavityReport(True, None)

def merge_atoms(values, probs, tol=1e-12):
    """Sort a discrete law and merge values closer than tol.

    Merged values are the probability weighted means of their group.
    """
    values = np.asarray(values, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    order = np.argsort(values, kind='stable')
    values = values[order]
    probs = probs[order]
    starts = np.concatenate(([0], np.nonzero(np.diff(values) > tol)[0] + 1))
    merged_probs = np.add.reduceat(probs, starts)
    merged_values = np.add.reduceat(values * probs, starts) / merged_probs
    # Keep exact values for singleton groups.
    sizes = np.diff(np.append(starts, len(values)))
    merged_values = np.where(sizes == 1, values[starts], merged_values)
    return merged_values, merged_probs

def _parse_real(s):
    return float(s)

def _support_end(value):
    if isinstance(value, str):
        return float(value)
    return int(value)

def pmf_from_family(doc):
    family = doc.get('family')
    policy = TailPolicy(float(doc.get('epsilon_tail', DEFAULT_TAIL_POLICY.epsilon_tail)),
                        int(doc.get('hard_cap', DEFAULT_TAIL_POLICY.hard_cap)))
    if family == 'bernoulli':
        return make_bernoulli(float(doc['p']))
    if family == 'geometric':
        return make_symmetric_geometric(float(doc['q']), policy)
    if family == 'uniform':
        return make_uniform(int(doc['a']), int(doc['b']))
    if family == 'masses':
        return make_from_masses([_parse_real(m) for m in doc['masses']], int(doc.get('k_min', 0)))
    raise ValidationError("unknown pmf family %r" % family)

def measure_from_json(doc):
    """Rebuild (and revalidate) a measure from its JSON document."""
    try:
        kind = doc['type']
        if kind == 'pmf1d':
            if 'family' in doc:
                return pmf_from_family(doc)
            g = np.array([_parse_real(x) for x in doc['log_mass']])
            support = doc.get('support')
            k_min, k_max = (None, None) if support is None else map(_support_end, support)
            return Pmf1D(int(doc['k_min']), -g, k_min=k_min, k_max=k_max,
                         symmetric=bool(doc.get('symmetric', False)),
                         tail_mass=_parse_real(doc.get('tail_mass', '0')))
        if kind == 'product':
            factors = [measure_from_json(f) for f in doc['factors']]
            factors = factors * int(doc.get('repeat', 1))
            return ProductLaw(factors)
        if kind == 'finite_atomic':
            points = [[_parse_real(v) for v in p] for p in doc['points']]
            probs = [_parse_real(v) for v in doc['probs']]
            return FiniteAtomicLaw(points, probs, bool(doc.get('full_dimensional', False)))
        if kind == 'lattice_ball':
            return LatticeBallLaw(int(doc['n']), float(doc['r']), float(doc['p']))
    except (KeyError, TypeError) as e:
        raise ValidationError("malformed measure document: %r" % e)
    raise ValidationError("unknown measure type %r" % doc.get('type'))

def measure_to_json(measure):
    return measure.to_json()

def as_product(measure):
    """View a Pmf1D as a one factor product; products pass through."""
    if isinstance(measure, Pmf1D):
        return ProductLaw([measure])
    if isinstance(measure, ProductLaw):
        return measure
    raise DomainError('measure', type(measure).__name__, "not a product law")

def as_atomic(measure, cap=ENUMERATION_CAP):
    """Explicit atom list for any measure with an enumerable support."""
    if isinstance(measure, FiniteAtomicLaw):
        return measure
    if isinstance(measure, LatticeBallLaw):
        return measure.to_atomic()
    law = as_product(measure)
    if law.support_size > cap:
        raise CapacityError("product support enumeration", law.support_size, cap)
    grids = np.meshgrid(*[f.ks for f in law.factors], indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=1)
    logp = law.log_mass(points)
    return FiniteAtomicLaw(points, np.exp(-logp) / math.fsum(np.exp(-logp)))

def read_measure(path):
    """Load a measure from a JSON file."""
    with open(path) as f:
        try:
            doc = json.load(f)
        except ValueError as e:
            raise ValidationError("%s is not valid JSON (%s)" % (path, e))
    if not isinstance(doc, dict):
        raise ValidationError("%s: expected a JSON object" % path)
    return measure_from_json(doc)
