"""Maximization of quasi-concave objectives over a domain.

``maximize`` is a nested grid refinement: a coarse lattice over the domain's
bounding box, then repeated zooming around the best few candidates.  Points
outside the domain, and points where the objective is ``-inf``, never win.
Objectives take an ``(N, m)`` array and return ``N`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .config import DEFAULT_TOLERANCES
from .errors import InfeasibleObjectiveError
from .geometry import Domain, as_point
from .utility import Utility, improving_mask

Objective = Callable[[np.ndarray], np.ndarray]

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SolverConfig:
    """Nested-grid settings.

    ``grid_points`` is the coarse lattice resolution per axis (0 picks a
    dimension-dependent default), ``local_points`` the per-axis resolution of
    each zoom window, ``refinement`` the window shrink factor per level and
    ``grid_depth`` the maximum number of zoom levels.  Refinement stops once
    the window half-width falls below ``tol``.
    """

    multistart: int = 3
    grid_depth: int = 60
    grid_points: int = 0
    local_points: int = 11
    refinement: float = 0.5
    tol: float = 1e-6
    tie_tol: float = 0.0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.grid_depth < 2:
            raise ValueError("grid depth must be at least 2")
        if self.multistart < 1:
            raise ValueError("multistart must be at least 1")
        if not 0 < self.refinement < 1:
            raise ValueError("refinement factor must lie in (0, 1)")
        if self.local_points < 3:
            raise ValueError("local grid needs at least 3 points per axis")

    def coarse_points(self, dim: int) -> int:
        if self.grid_points:
            return self.grid_points
        return {1: 201, 2: 41, 3: 21}.get(dim, 9)


DEFAULT_SOLVER = SolverConfig()


def _box_grid(lo, hi, per_axis):
    axes = [np.linspace(a, b, per_axis) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))


def _feasible_values(obj, domain, X):
    inside = domain.mask(X)
    vals = np.full(X.shape[0], -np.inf)
    if np.any(inside):
        v = np.asarray(obj(X[inside]), dtype=float)
        vals[inside] = np.where(np.isnan(v), -np.inf, v)
    return vals


def _pick(vals, X, tie_tol):
    i = kernels.argmax_lex(vals, X, tie_tol)
    return i


def _refine(obj, domain, start, start_val, radius, cfg):
    best, best_val = start, start_val
    r = radius.copy()
    for _ in range(cfg.grid_depth):
        if r.max() < cfg.tol:
            break
        lo = np.maximum(best - r, domain.lower)
        hi = np.minimum(best + r, domain.upper)
        X = np.vstack([_box_grid(lo, hi, cfg.local_points), best[None, :]])
        vals = _feasible_values(obj, domain, X)
        vals[-1] = best_val
        i = _pick(vals, X, cfg.tie_tol)
        best, best_val = X[i].copy(), vals[i]
        r = r * cfg.refinement
    return best, best_val


def maximize(obj: Objective, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER, seeds=()) -> np.ndarray:
    """Grid-refined maximizer of ``obj`` over ``domain``.

    ``seeds`` are extra candidate points (e.g. a status quo known to be
    feasible) that join the coarse grid.  Ties are broken towards the
    lexicographically smallest point.
    """
    n = cfg.coarse_points(domain.dim)
    X = _box_grid(domain.lower, domain.upper, n)
    seeds = [as_point(s, domain.dim) for s in seeds]
    if seeds:
        X = np.vstack([X, np.array(seeds)])
    vals = _feasible_values(obj, domain, X)
    if not np.any(np.isfinite(vals)):
        raise InfeasibleObjectiveError("objective is -inf on the entire search grid")

    # distinct starting candidates, best first
    starts = []
    remaining = vals.copy()
    for _ in range(cfg.multistart):
        i = _pick(remaining, X, cfg.tie_tol)
        if i < 0:
            break
        starts.append(i)
        remaining[i] = -np.inf
    # seeds always get a refinement of their own
    for k in range(len(seeds)):
        i = X.shape[0] - len(seeds) + k
        if np.isfinite(vals[i]) and i not in starts:
            starts.append(i)

    radius = 2.0 * (domain.upper - domain.lower) / (n - 1)
    results = [_refine(obj, domain, X[i].copy(), vals[i], radius, cfg) for i in starts]
    pts = np.array([p for p, _ in results])
    rv = np.array([v for _, v in results])
    return pts[_pick(rv, pts, cfg.tie_tol)]


def golden_section(f, a, b, tol=None):
    """Maximizer of a unimodal scalar function on ``[a, b]``."""
    if tol is None:
        tol = DEFAULT_TOLERANCES.line_search_tol
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    c = b - INV_PHI * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        h *= INV_PHI
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * h
            fd = f(d)
    return 0.5 * (a + b)


def line_argmax(u: Utility, origin, d, lambda_max: float, tol=None) -> float:
    """Step ``lam`` in ``[0, lambda_max]`` maximizing ``u(origin + lam * d)``.

    Golden-section search assumes unimodality along the ray (quasi-concavity).
    The two endpoints are compared explicitly, so monotone rays return an
    exact endpoint; equal values prefer the shorter step.
    """
    if lambda_max < 0:
        raise ValueError("lambda_max must be non-negative")
    o = np.asarray(origin, dtype=float)
    d = np.asarray(d, dtype=float)
    if lambda_max == 0:
        return 0.0

    def f(lam):
        v = u.values(o + lam * d)[0]
        return -np.inf if np.isnan(v) else v

    mid = golden_section(f, 0.0, float(lambda_max), tol)
    cands = [0.0, mid, float(lambda_max)]
    vals = [f(c) for c in cands]
    best = max(vals)
    for c, v in zip(cands, vals):
        if v == best:
            return c
    return 0.0


def constrained_argmax(u: Utility, profile, anchor, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Maximize ``u`` over the points every party weakly prefers to ``anchor``."""
    anchor = as_point(anchor, domain.dim)

    def objective(X):
        v = u.values(X)
        return np.where(improving_mask(profile, anchor, X), v, -np.inf)

    return maximize(objective, domain, cfg, seeds=[anchor])
