"""Concrete negotiation methods and their settlement map.

Each method is a small frozen record; :func:`settle` turns a record, a
utility profile and a status quo ``x0`` into the settlement point.  Methods
defined by an objective are solved with :func:`negolab.solver.maximize`; the
improving direction method and the Pareto-invariant method are constructed
directly.

Party indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DegenerateInputError, InfeasibleObjectiveError, NegotiationDefault
from .geometry import Domain, as_point, contains, ray_extent
from .solver import DEFAULT_SOLVER, SolverConfig, line_argmax, maximize
from .utility import Utility, check_profile, gain_matrix, improving_mask, profile_values, weight_vector


@dataclass(frozen=True)
class Dummy:
    """Always settles at ``target``, whatever the profile or status quo."""

    target: tuple


@dataclass(frozen=True)
class Egalitarian:
    pass


@dataclass(frozen=True)
class Nash:
    pass


@dataclass(frozen=True)
class WeightedLagrange:
    weights: tuple
    lagrange: tuple = ()


@dataclass(frozen=True)
class LogBarrierWeighted:
    weights: tuple


@dataclass(frozen=True)
class IDM:
    pass


@dataclass(frozen=True)
class ParetoInvariant:
    angles: int = 720


@dataclass(frozen=True)
class Dictatorial:
    dictator: int


MethodSpec = Dummy | Egalitarian | Nash | WeightedLagrange | LogBarrierWeighted | IDM | ParetoInvariant | Dictatorial

METHOD_KINDS = {
    "dummy": Dummy,
    "egalitarian": Egalitarian,
    "nash": Nash,
    "lagrange": WeightedLagrange,
    "logbarrier-weighted": LogBarrierWeighted,
    "idm": IDM,
    "pareto-invariant": ParetoInvariant,
    "dictatorial": Dictatorial,
}


def method_kind(method) -> str:
    for name, cls in METHOD_KINDS.items():
        if isinstance(method, cls):
            return name
    raise TypeError(f"not a method spec: {method!r}")


def check_arity(method, n_parties: int) -> None:
    """Raise ValueError when ``method`` cannot run with ``n_parties`` parties."""
    if isinstance(method, ParetoInvariant) and n_parties != 2:
        raise ValueError("the Pareto-invariant method is defined for exactly 2 parties")
    if isinstance(method, Dictatorial) and not 0 <= method.dictator < n_parties:
        raise ValueError(f"dictator index {method.dictator} out of range for {n_parties} parties")
    if isinstance(method, (WeightedLagrange, LogBarrierWeighted)):
        weight_vector(method.weights, n_parties)
    if isinstance(method, WeightedLagrange) and method.lagrange:
        lam = np.asarray(method.lagrange, dtype=float)
        if lam.shape != (n_parties,) or np.any(lam < 0):
            raise ValueError("lagrange multipliers must be n non-negative numbers")


def _gains(profile, x0, X):
    return gain_matrix(profile, x0, X)


def _weighted_sum(weights, vals):
    keep = weights > 0
    return weights[keep] @ vals[keep]


def method_objective(method, profile, x0):
    """The objective whose maximizer over the domain is the settlement."""
    x0 = as_point(x0)

    if isinstance(method, Egalitarian):
        def obj(X):
            g = _gains(profile, x0, X)
            return np.where(np.all(g >= 0, axis=0), g.min(axis=0), -np.inf)
    elif isinstance(method, Nash):
        def obj(X):
            g = _gains(profile, x0, X)
            return np.where(np.all(g >= 0, axis=0), np.prod(np.clip(g, 0, None), axis=0), -np.inf)
    elif isinstance(method, LogBarrierWeighted):
        w = weight_vector(method.weights, len(profile))

        def obj(X):
            g = _gains(profile, x0, X)
            return np.where(np.all(g >= 0, axis=0), _weighted_sum(w, g), -np.inf)
    elif isinstance(method, Dictatorial):
        k = method.dictator

        def obj(X):
            return np.where(improving_mask(profile, x0, X), profile[k].values(X), -np.inf)
    elif isinstance(method, WeightedLagrange):
        w = weight_vector(method.weights, len(profile))
        lam = np.asarray(method.lagrange or np.zeros(len(profile)), dtype=float)
        linear = np.zeros_like(x0)
        for li, u in zip(lam, profile):
            if li != 0:
                linear = linear + li * u.grad(x0)

        def obj(X):
            return _weighted_sum(w, profile_values(profile, X)) + (X - x0) @ linear
    else:
        raise TypeError(f"{type(method).__name__} has no closed-form objective")
    return obj


def settle(method, profile: Sequence[Utility], x0, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Settlement of ``method`` for ``profile`` starting from the status quo ``x0``."""
    profile = check_profile(profile)
    x0 = as_point(x0, domain.dim)
    if not contains(domain, x0):
        raise ValueError("status quo lies outside the domain")
    check_arity(method, len(profile))

    if isinstance(method, Dummy):
        target = as_point(method.target, domain.dim)
        if not contains(domain, target):
            raise ValueError("dummy target lies outside the domain")
        return target
    if isinstance(method, IDM):
        return idm_step(profile, x0, domain)
    if isinstance(method, ParetoInvariant):
        return pareto_invariant_settle(profile, x0, domain, angles=method.angles)
    if isinstance(method, WeightedLagrange):
        return lagrange_settle(method.weights, method.lagrange, profile, x0, domain, cfg)

    try:
        return maximize(method_objective(method, profile, x0), domain, cfg, seeds=[x0])
    except InfeasibleObjectiveError as exc:
        raise NegotiationDefault(str(exc)) from exc


def lagrange_settle(weights, lagrange, profile, x0, domain: Domain, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Maximize ``<w, u>(x) + sum_i lam_i (x - x0) . grad u_i(x0)`` over the domain.

    With every multiplier zero this is the plain weighting method.
    """
    method = WeightedLagrange(tuple(weights), tuple(lagrange or ()))
    check_arity(method, len(profile))
    return maximize(method_objective(method, profile, as_point(x0, domain.dim)), domain, cfg, seeds=[x0])


# --- improving direction method -------------------------------------------------


@dataclass(frozen=True, eq=False)
class _DirectionRegion:
    """Admissible directions at a point, in the duck-typed shape ``maximize`` expects."""

    dim: int
    lower: np.ndarray
    upper: np.ndarray
    normals: np.ndarray
    caps: np.ndarray

    def mask(self, D, slack=0.0):
        ok = np.all(D >= self.lower, axis=1) & np.all(D <= self.upper, axis=1)
        if len(self.caps):
            ok &= np.all(D @ self.normals.T <= self.caps, axis=1)
        return ok & ((D**2).sum(axis=1) <= 1.0)


_DIRECTION_SOLVER = SolverConfig(tol=1e-10, multistart=2)


def idm_direction(profile, x, domain: Domain, eps=None):
    """Generalized bisector of the parties' gradients at ``x``.

    Maximizes the product of ``(normalized gradient_i . d)`` over unit ``d``
    with every factor positive and ``x + eps * d`` inside the domain.  Returns
    ``None`` when no direction improves every party (``x`` is at the frontier).
    """
    if eps is None:
        eps = DEFAULT_TOLERANCES.direction_eps
    x = as_point(x, domain.dim)
    grads = np.array([u.grad(x) for u in profile])
    norms = np.linalg.norm(grads, axis=1)
    if np.any(norms < DEFAULT_TOLERANCES.gradient_floor):
        raise DegenerateInputError("a party's gradient vanishes; no improving direction is defined")
    unit = grads / norms[:, None]

    region = _DirectionRegion(
        dim=domain.dim,
        lower=np.maximum(-1.0, (domain.lower - x) / eps),
        upper=np.minimum(1.0, (domain.upper - x) / eps),
        normals=domain.normals,
        caps=(domain.offsets - domain.normals @ x) / eps,
    )
    if np.any(region.lower > region.upper):
        return None

    n = unit.shape[0]

    def obj(D):
        # scale-free: the box of candidate d is not a sphere, so divide out |d|^n
        dots = D @ unit.T
        lengths = np.linalg.norm(D, axis=1)
        ok = np.all(dots > 0, axis=1) & (lengths > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.where(dots > 0, dots, 1.0)).sum(axis=1) - n * np.log(np.where(ok, lengths, 1.0))
        return np.where(ok, logs, -np.inf)

    try:
        d = maximize(obj, region, _DIRECTION_SOLVER)
    except InfeasibleObjectiveError:
        return None
    norm = np.linalg.norm(d)
    if norm == 0:
        return None
    return d / norm


def idm_step(profile, x, domain: Domain) -> np.ndarray:
    """One IDM move: along the bisector, up to the first party's best point on the ray."""
    x = as_point(x, domain.dim)
    d = idm_direction(profile, x, domain)
    if d is None:
        return x.copy()
    lam_max = ray_extent(domain, x, d)
    step = min(line_argmax(u, x, d, lam_max) for u in profile)
    return x + step * d


# --- Pareto-invariant method ----------------------------------------------------


def _ray_argmax_batch(u, origin, dirs, lam_max, tol):
    """Vectorized golden-section ray maximization, same semantics as ``line_argmax``."""
    K = dirs.shape[0]

    def f(lam):
        v = u.values(origin + lam[:, None] * dirs)
        return np.where(np.isnan(v), -np.inf, v)

    a = np.zeros(K)
    b = lam_max.copy()
    h = b - a
    c = b - (math.sqrt(5) - 1) / 2 * h
    d = a + (math.sqrt(5) - 1) / 2 * h
    fc, fd = f(c), f(d)
    inv_phi = (math.sqrt(5) - 1) / 2
    while h.max() > tol:
        h = h * inv_phi
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - inv_phi * h
        new_d = a + inv_phi * h
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, f(new_c), fd)
        fd_next = np.where(left, fc, f(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    mid = 0.5 * (a + b)
    cands = np.stack([np.zeros(K), mid, lam_max])
    vals = np.stack([f(cands[0]), f(cands[1]), f(cands[2])])
    # first index attaining the max prefers the shorter step
    pick = np.argmax(vals == vals.max(axis=0), axis=0)
    out = cands[pick, np.arange(K)]
    return np.where(lam_max > 0, out, 0.0)


def _ray_pair(profile, x0, domain, theta):
    d = np.array([math.cos(theta), math.sin(theta)])
    lm = ray_extent(domain, x0, d)
    return d, line_argmax(profile[0], x0, d, lm), line_argmax(profile[1], x0, d, lm)


def pareto_invariant_settle(profile, x0, domain: Domain, angles: int = 720, theta_tol: float = 1e-8) -> np.ndarray:
    """Crossing of the two parties' strictly improving frontiers seen from ``x0``.

    For each ray from ``x0`` each party's best step ``lam_i(theta)`` is found
    by line search; the settlement is ``x0 + lam d`` where the two steps
    coincide with ``lam > 0``.  Several crossings resolve to the one farthest
    from ``x0``; none leaves ``x0`` in place.
    """
    profile = check_profile(profile)
    if len(profile) != 2:
        raise ValueError("the Pareto-invariant method is defined for exactly 2 parties")
    if domain.dim != 2:
        raise ValueError("the Pareto-invariant sweep is implemented for planar domains")
    x0 = as_point(x0, domain.dim)
    thetas = 2 * math.pi * np.arange(angles) / angles
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    lam_max = np.array([ray_extent(domain, x0, d) for d in dirs])
    tol = DEFAULT_TOLERANCES.line_search_tol
    l1 = _ray_argmax_batch(profile[0], x0, dirs, lam_max, tol)
    l2 = _ray_argmax_batch(profile[1], x0, dirs, lam_max, tol)
    h = l1 - l2
    floor = 1e-7 * domain.diameter

    crossings = []
    for k in range(angles):
        if h[k] == 0 and l1[k] > floor:
            crossings.append(x0 + l1[k] * dirs[k])
        k2 = (k + 1) % angles
        if h[k] * h[k2] < 0:
            lo, hi = thetas[k], thetas[k] + 2 * math.pi / angles
            h_lo = h[k]
            while hi - lo > theta_tol:
                mid = 0.5 * (lo + hi)
                _, a, b = _ray_pair(profile, x0, domain, mid)
                if (a - b) * h_lo > 0:
                    lo, h_lo = mid, a - b
                else:
                    hi = mid
            d, a, b = _ray_pair(profile, x0, domain, 0.5 * (lo + hi))
            lam = 0.5 * (a + b)
            if lam > floor and abs(a - b) <= 1e-6 * max(1.0, lam):
                crossings.append(x0 + lam * d)

    if not crossings:
        return x0.copy()
    pts = np.array(crossings)
    dist = np.linalg.norm(pts - x0, axis=1)
    best = dist.max()
    cand = pts[dist >= best - 1e-12]
    order = np.lexsort(cand.T[::-1])
    return cand[order[0]]
