"""Convex hull membership and Tukey half-space depth."""

import math
from typing import NamedTuple

import numpy as np

from . import log
from .action import Action, register_action
from .cramer import cramer_product
from .measures import (CapacityError,
                       DomainError,
                       FiniteAtomicLaw,
                       LatticeBallLaw,
                       Pmf1D,
                       ProductLaw,
                       as_atomic,
                       as_product,
                       merge_atoms,
                       read_measure)
from .options import FileOption, FloatListOption, IntOption

module_logger = log.get_module_logger(__file__)

MARGINAL_TOLERANCE = 1e-9
RECONSTRUCTION_TOLERANCE = 1e-9
HALFSPACE_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-12
MAX_PIVOTS = 10**5
DEPTH_2D_CAP = 10**5
DP_CAP = 10**6

class SolverStallError(RuntimeError):
    pass

class HullWitness(NamedTuple):
    status: str
    coefficients: object = None
    separator: object = None
    margin: float = 0.0

    def to_json(self):
        doc = {'status': self.status, 'margin': self.margin}
        if self.coefficients is not None:
            doc['coefficients'] = [float(v) for v in self.coefficients]
        if self.separator is not None:
            theta, offset = self.separator
            doc['separator'] = {'theta': [float(v) for v in theta], 'offset': float(offset)}
        return doc

def _pivot(T, row, col):
    T[row, :] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row, :])

def _enter(z_row):
    # Bland: smallest index with negative reduced cost.
    idx = np.nonzero(z_row[:-1] < -PIVOT_TOLERANCE)[0]
    return int(idx[0]) if len(idx) else -1

def _leave(T, col, basis):
    a = T[:-1, col]
    rows = np.nonzero(a > PIVOT_TOLERANCE)[0]
    if not len(rows):
        return -1
    ratios = T[rows, -1] / a[rows]
    best = ratios.min()
    tied = rows[ratios <= best + PIVOT_TOLERANCE * max(1.0, abs(best))]
    # Bland: among ties, the smallest basic variable leaves.
    return int(tied[np.argmin([basis[r] for r in tied])])

def _phase_one(points, x):
    """Minimize the artificial sum for {lambda >= 0, sum lambda = 1, P^T lambda = x}.

    Returns the final tableau, the basis and the row signs used to make the
    right hand side nonnegative.
    """
    m, n = points.shape
    rows = n + 1
    A = np.vstack([points.T, np.ones(m)])
    b = np.append(x, 1.0)
    signs = np.where(b < 0, -1.0, 1.0)
    T = np.zeros((rows + 1, m + rows + 1))
    T[:rows, :m] = A * signs[:, None]
    T[:rows, m:m + rows] = np.eye(rows)
    T[:rows, -1] = b * signs
    T[-1, :] = -T[:rows, :].sum(axis=0)
    T[-1, m:m + rows] = 0.0
    basis = list(range(m, m + rows))
    for _ in range(MAX_PIVOTS):
        col = _enter(T[-1, :])
        if col < 0:
            return T, basis, signs
        row = _leave(T, col, basis)
        if row < 0:
            # Phase one objective is bounded below by zero.
            raise SolverStallError("phase one reported unbounded")
        _pivot(T, row, col)
        basis[row] = col
    raise SolverStallError("simplex exceeded %d pivots" % MAX_PIVOTS)

def _separator_margin(theta, x, points):
    norm = np.linalg.norm(theta)
    if not norm > 0 or not np.all(np.isfinite(theta)):
        return None, -math.inf
    theta = theta / norm
    offset = float(np.max(points @ theta))
    return (theta, offset), float(x @ theta - offset)

def hull_membership(x, points, tol=MARGINAL_TOLERANCE):
    """Decide x in conv(points) with a self-verifying witness.

    inside carries convex weights reconstructing x, outside a unit direction
    theta and offset with <theta, x> > offset >= max <theta, X_i>. Points the
    solver cannot certify either way come back marginal.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    if len(points) == 0:
        raise DomainError('points', 0, "need at least one point")
    if points.shape[1] != len(x):
        raise DomainError('x', len(x), "dimension differs from points (%d)" % points.shape[1])
    m, n = points.shape
    hit = np.nonzero(np.all(points == x, axis=1))[0]
    if len(hit):
        weights = np.zeros(m)
        weights[hit[0]] = 1.0
        return HullWitness('inside', weights, None, 0.0)
    above = x - points.max(axis=0)
    below = points.min(axis=0) - x
    i_above, i_below = int(np.argmax(above)), int(np.argmax(below))
    if max(above[i_above], below[i_below]) > tol:
        theta = np.zeros(n)
        if above[i_above] >= below[i_below]:
            theta[i_above] = 1.0
        else:
            theta[i_below] = -1.0
        separator, margin = _separator_margin(theta, x, points)
        return HullWitness('outside', None, separator, margin)
    T, basis, signs = _phase_one(points, x)
    objective = -T[-1, -1]
    if objective <= tol:
        weights = np.zeros(m)
        for r, j in enumerate(basis):
            if j < m:
                weights[j] = T[r, -1]
        weights = np.maximum(weights, 0.0)
        total = weights.sum()
        if total > 0:
            weights /= total
            error = np.max(np.abs(weights @ points - x))
            if error <= RECONSTRUCTION_TOLERANCE:
                return HullWitness('inside', weights, None, -float(objective))
        return HullWitness('marginal', None, None, float(objective))
    # Dual of the phase one problem: y_j = 1 - reduced cost of artificial j.
    y = (1.0 - T[-1, m:m + n + 1]) * signs
    separator, margin = _separator_margin(y[:n], x, points)
    if margin > tol:
        return HullWitness('outside', None, separator, margin)
    return HullWitness('marginal', None, separator, margin)

def verify_witness(witness, x, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    if witness.status == 'inside':
        w = np.asarray(witness.coefficients)
        return bool(np.all(w >= 0) and abs(w.sum() - 1) <= 1e-12
                    and np.max(np.abs(w @ points - x)) <= RECONSTRUCTION_TOLERANCE)
    if witness.status == 'outside':
        theta, offset = witness.separator
        return bool(x @ theta - offset > MARGINAL_TOLERANCE
                    and np.max(points @ theta) <= offset + 1e-15)
    return True

def convex_hull_2d(points):
    """Counterclockwise hull vertices by the monotone chain."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float).tolist())))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])

def polygon_contains(x, points):
    """Orientation test containment in the 2D hull.

    Returns (inside, distance) where distance is the signed distance to the
    nearest hull edge line (positive inside); degenerate hulls are handled by
    segment distance.
    """
    hull = convex_hull_2d(points)
    x = np.asarray(x, dtype=float)
    if len(hull) == 1:
        d = float(np.linalg.norm(x - hull[0]))
        return d == 0.0, -d
    if len(hull) == 2:
        a, b = hull
        t = np.clip(np.dot(x - a, b - a) / np.dot(b - a, b - a), 0, 1)
        d = float(np.linalg.norm(a + t * (b - a) - x))
        return d == 0.0, -d
    nxt = np.roll(hull, -1, axis=0)
    edge = nxt - hull
    rel = x - hull
    cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    dist = cross / np.linalg.norm(edge, axis=1)
    return bool(np.all(cross >= 0)), float(dist.min())

def _unit(theta, c):
    theta = np.asarray(theta, dtype=float).ravel()
    norm = np.linalg.norm(theta)
    if not norm > 0:
        raise DomainError('theta', theta.tolist(), "direction must be nonzero")
    return theta / norm, c / norm

def halfspace_mass(law, theta, c):
    """mu({y : <y, theta> >= c}) for a unit theta (renormalized here)."""
    theta, c = _unit(theta, c)
    if isinstance(law, LatticeBallLaw):
        law = law.to_atomic()
    if isinstance(law, FiniteAtomicLaw):
        if len(theta) != law.n:
            raise DomainError('theta', len(theta), "expected dimension %d" % law.n)
        return math.fsum(law.probs[law.points @ theta >= c - HALFSPACE_TOLERANCE])
    law = as_product(law)
    if len(theta) != law.n:
        raise DomainError('theta', len(theta), "expected dimension %d" % law.n)
    active = np.nonzero(theta)[0]
    if len(active) == 1:
        i = int(active[0])
        f = law.factors[i]
        if theta[i] > 0:
            return f.survival(c)
        return f.cdf(-c)
    values = np.zeros(1)
    probs = np.ones(1)
    for i in active:
        f = law.factors[i]
        if len(values) * len(f) > DP_CAP:
            raise CapacityError("half-space mass convolution", len(values) * len(f), DP_CAP)
        values, probs = merge_atoms(np.add.outer(values, theta[i] * f.ks), np.multiply.outer(probs, f.masses),
                                    tol=1e-14)
    return min(math.fsum(probs[values >= c - HALFSPACE_TOLERANCE]), 1.0)

def tukey_depth_1d(pmf, x):
    """min(mu([x, inf)), mu((-inf, x]))."""
    if isinstance(pmf, ProductLaw) and pmf.n == 1:
        pmf = pmf.factors[0]
    return min(pmf.survival(x), pmf.cdf(x))

def tukey_depth_2d(law, x):
    """Exact depth in the plane by an angular sweep around x.

    Atoms at x lie in every half-plane. For the others, every closed
    half-plane through x holds an arc of angles of length pi, and a minimal
    arc can always be taken to end just before some atom angle, so the
    candidates are the arcs [phi_j - pi, phi_j).
    """
    law = as_atomic(law) if not isinstance(law, FiniteAtomicLaw) else law
    if law.n != 2:
        raise DomainError('law', law.n, "exact depth needs dimension 2")
    if len(law) > DEPTH_2D_CAP:
        raise CapacityError("2D depth sweep", len(law), DEPTH_2D_CAP)
    x = np.asarray(x, dtype=float).ravel()
    v = law.points - x
    at = np.all(np.abs(v) <= HALFSPACE_TOLERANCE, axis=1)
    mass0 = math.fsum(law.probs[at])
    v = v[~at]
    p = law.probs[~at]
    if not len(v):
        return mass0
    phi = np.arctan2(v[:, 1], v[:, 0])
    order = np.argsort(phi, kind='stable')
    phi = phi[order]
    p = p[order]
    ext_phi = np.concatenate((phi - 2 * math.pi, phi))
    ext_cum = np.concatenate(([0.0], np.cumsum(np.concatenate((p, p)))))
    eps = HALFSPACE_TOLERANCE
    i_lo = np.searchsorted(ext_phi, phi - math.pi - eps, side='left')
    i_hi = np.searchsorted(ext_phi, phi - eps, side='left')
    arcs = ext_cum[i_hi] - ext_cum[i_lo]
    return min(mass0 + max(float(arcs.min()), 0.0), 1.0)

def tukey_depth_sampled(law, x, n_dirs=1000, seed=0, chunk=4096):
    """Minimum half-space mass over n_dirs random unit directions.

    An UPPER bound on the depth: the infimum over a subset of directions is
    never below the infimum over the whole sphere.
    """
    x = np.asarray(x, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((int(n_dirs), len(x)))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    try:
        atomic = as_atomic(law, cap=DP_CAP)
    except CapacityError:
        atomic = None
    if atomic is None:
        return min(halfspace_mass(law, d, float(x @ d)) for d in dirs)
    if atomic.n != len(x):
        raise DomainError('x', len(x), "expected dimension %d" % atomic.n)
    rel = atomic.points - x
    best = 1.0
    for start in range(0, len(dirs), chunk):
        proj = rel @ dirs[start:start + chunk].T
        masses = atomic.probs @ (proj >= -HALFSPACE_TOLERANCE)
        best = min(best, float(masses.min()))
    return best

class DepthEvalAction(Action):
    action_name = 'depth-eval'
    tooltip = 'Tukey half-space depth of a point, exact where possible, else a sampled upper bound.'

    def get_options(self):
        return [FileOption('measure', required=True, tooltip='Measure JSON file.'),
                FloatListOption('x', required=True, tooltip='Comma separated coordinates of the point.'),
                IntOption('n-dirs', minimum=1, default=10000, tooltip='Random directions for the sampled bound.')]

    def run(self):
        self.ensure_seed()
        measure = read_measure(self.params['measure'])
        x = np.asarray(self.params['x'], dtype=float)
        n = measure.n if not isinstance(measure, Pmf1D) else 1
        if len(x) != n:
            raise DomainError('x', self.params['x'], "expected %d coordinates" % n)
        if n == 1:
            law = measure.factors[0] if isinstance(measure, ProductLaw) else measure
            if isinstance(law, Pmf1D):
                depth, method = tukey_depth_1d(law, float(x[0])), 'exact_1d'
            else:
                depth = min(halfspace_mass(law, [1.0], x[0]), halfspace_mass(law, [-1.0], -x[0]))
                method = 'exact_1d'
        elif n == 2:
            depth, method = tukey_depth_2d(measure, x), 'exact_2d'
        else:
            depth = tukey_depth_sampled(measure, x, self.params['n_dirs'], self.seed)
            method = 'sampled'
        columns = ['depth', 'method', 'bias']
        row = [depth, method, 'upper_bound' if method == 'sampled' else 'exact']
        if isinstance(measure, (Pmf1D, ProductLaw)):
            columns.append('exp_minus_lambda_star')
            row.append(math.exp(-cramer_product(measure, x)))
        return columns, [row]

register_action(DepthEvalAction)
