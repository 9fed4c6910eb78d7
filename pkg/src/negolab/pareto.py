"""Pareto frontier sampling, membership residuals and frontier comparison."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from . import kernels
from .config import DEFAULT_TOLERANCES
from .errors import DegenerateInputError, DomainError, InfeasibleObjectiveError
from .geometry import Domain, as_point
from .solver import DEFAULT_SOLVER, SolverConfig, maximize
from .utility import check_profile, gain_matrix, profile_values, weight_vector


@dataclass(frozen=True, eq=False)
class ParetoSample:
    """Frontier points in sweep order.

    ``generating_weights[k]`` is the weight vector whose weighted-sum optimum
    produced ``points[k]``, or ``None`` for points inserted by gap filling.
    """

    points: np.ndarray
    generating_weights: list = field(default_factory=list)

    def __len__(self):
        return self.points.shape[0]

    @property
    def boundary_weight(self) -> list:
        """Flags points generated only by weights with a zero component."""
        return [w is not None and bool(np.any(w == 0)) for w in self.generating_weights]

    @property
    def spacing(self) -> float:
        """Longest edge of the minimum spanning tree over the sample."""
        if len(self) < 2:
            return 0.0
        mst = minimum_spanning_tree(squareform(pdist(self.points)))
        return float(mst.data.max()) if mst.nnz else 0.0


def weight_grid(n_parties: int, resolution: int) -> np.ndarray:
    """Uniform simplex lattice; for two parties the first weight runs from 1 down to 0."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    steps = resolution - 1
    rows = [
        c for c in itertools.product(range(steps, -1, -1), repeat=n_parties - 1) if sum(c) <= steps
    ]
    return np.array([list(c) + [steps - sum(c)] for c in rows], dtype=float) / steps


def weighting_solution(profile, w, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Maximizer of ``<w, u>`` over the domain; zero-weight parties are ignored."""
    profile = check_profile(profile)
    w = weight_vector(w, len(profile))
    keep = w > 0

    def obj(X):
        return w[keep] @ profile_values([u for u, k in zip(profile, keep) if k], X)

    return maximize(obj, domain, cfg)


def _epsilon_point(profile, level, seeds, domain, cfg):
    """Maximize party 0's utility subject to party 1 reaching ``level``."""
    u1, u2 = profile

    def obj(X):
        return np.where(u2.values(X) >= level, u1.values(X), -np.inf)

    return maximize(obj, domain, cfg, seeds=seeds)


def _fill(profile, p, q, gap, domain, cfg, depth, out):
    if depth == 0 or np.linalg.norm(p - q) <= gap * (1 + 1e-6):
        return
    v2p, v2q = profile[1].values(np.vstack([p, q]))
    if not v2q > v2p:
        return
    if np.isfinite(v2p):
        level = 0.5 * (v2p + v2q)
    else:
        level = v2q - (1.0 + abs(v2q))
    try:
        r = _epsilon_point(profile, level, [p, q, 0.5 * (p + q)], domain, cfg)
    except InfeasibleObjectiveError:
        return
    if min(np.linalg.norm(r - p), np.linalg.norm(r - q)) < 1e-9:
        return
    _fill(profile, p, r, gap, domain, cfg, depth - 1, out)
    out.append(r)
    _fill(profile, r, q, gap, domain, cfg, depth - 1, out)


def frontier_sample(
    profile, resolution: int, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER, fill_gaps: bool = True
) -> ParetoSample:
    """Sample the Pareto set by sweeping a uniform grid of weights.

    Weighted sums only reach every efficient point when the utilities are
    concave.  For two parties, consecutive points farther apart than
    ``diameter / (resolution - 1)`` are bridged by epsilon-constraint solves
    (best point for party 0 given a floor on party 1), which stay valid for
    quasi-concave profiles.
    """
    profile = check_profile(profile)
    pts, ws = [], []
    for w in weight_grid(len(profile), resolution):
        x = weighting_solution(profile, w, domain, cfg)
        if pts and np.min(np.linalg.norm(np.array(pts) - x, axis=1)) < 1e-6:
            continue
        pts.append(x)
        ws.append(w)
    if fill_gaps and len(profile) == 2 and len(pts) > 1:
        gap = domain.diameter / (resolution - 1)
        filled_pts, filled_ws = [pts[0]], [ws[0]]
        for k in range(1, len(pts)):
            extra = []
            _fill(profile, pts[k - 1], pts[k], gap, domain, cfg, 12, extra)
            for r in extra:
                if np.min(np.linalg.norm(np.array(filled_pts) - r, axis=1)) >= 1e-6:
                    filled_pts.append(r)
                    filled_ws.append(None)
            filled_pts.append(pts[k])
            filled_ws.append(ws[k])
        pts, ws = filled_pts, filled_ws
    return ParetoSample(np.array(pts), ws)


def probe_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit directions."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        # Fibonacci sphere
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        r = np.sqrt(1 - z**2)
        phi = np.pi * (3 - np.sqrt(5)) * k
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    g = np.random.default_rng(12345).normal(size=(count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _ray_extents(domain, x, dirs):
    lam = np.full(dirs.shape[0], np.inf)
    ad = dirs @ domain.normals.T
    room = domain.offsets - domain.normals @ x
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.minimum(lam, np.where(ad > 0, room / ad, np.inf).min(axis=1, initial=np.inf))
        up = np.where(dirs > 0, (domain.upper - x) / dirs, np.inf).min(axis=1)
        down = np.where(dirs < 0, (domain.lower - x) / dirs, np.inf).min(axis=1)
    return np.clip(np.minimum(lam, np.minimum(up, down)), 0.0, None)


def pareto_residual(profile, x, domain: Domain, probe_count: int = 360, delta=None) -> float:
    """Largest joint gain available from short probes around ``x``.

    For each probe direction the step is ``min(delta, distance to the
    boundary)``; the probe's score is the smallest per-party gain.  Zero means
    no probe improves every party.
    """
    from .methods import idm_direction

    profile = check_profile(profile)
    x = as_point(x, domain.dim)
    if delta is None:
        delta = DEFAULT_TOLERANCES.residual_delta * domain.diameter
    dirs = probe_directions(domain.dim, probe_count)
    try:
        d = idm_direction(profile, x, domain)
    except (DegenerateInputError, DomainError):
        d = None
    if d is not None:
        dirs = np.vstack([dirs, d])
    steps = np.minimum(delta, _ray_extents(domain, x, dirs))
    live = steps > 0
    if not np.any(live):
        return 0.0
    X = x + steps[live, None] * dirs[live]
    gains = gain_matrix(profile, x, X)
    best = np.nan_to_num(gains.min(axis=0), nan=-np.inf).max()
    return float(max(best, 0.0))


def frontier_distance(a: ParetoSample, b: ParetoSample) -> float:
    """Symmetric Hausdorff distance between two samples."""
    A = a.points if isinstance(a, ParetoSample) else np.asarray(a, dtype=float)
    B = b.points if isinstance(b, ParetoSample) else np.asarray(b, dtype=float)
    if A.size == 0 or B.size == 0:
        raise ValueError("cannot compare an empty frontier sample")
    if A.shape[1] != B.shape[1]:
        raise ValueError("frontier samples live in different dimensions")
    return kernels.hausdorff(A, B)
