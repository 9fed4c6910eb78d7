"""Negotiation domains: bounded convex polytopes in H-representation.

A domain is the intersection of half-spaces ``a_k . x <= b_k`` with a finite
coordinate box.  Points are plain 1-D float arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .config import DEFAULT_TOLERANCES
from .errors import DegenerateInputError

MAX_DIM = 6


def as_point(x, dim=None) -> np.ndarray:
    p = np.array(x, dtype=float).reshape(-1)
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"point has dimension {p.shape[0]}, domain has {dim}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def unit_direction(v) -> np.ndarray:
    """Normalize ``v`` to a unit direction."""
    d = np.array(v, dtype=float).reshape(-1)
    norm = np.linalg.norm(d)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("direction must be a finite non-zero vector")
    return d / norm


def _check_direction(d, dim):
    d = as_point(d, dim)
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("direction must have unit Euclidean norm")
    return d


@dataclass(frozen=True, eq=False)
class Domain:
    """Bounded convex feasible set ``{x : A x <= b, lower <= x <= upper}``."""

    dim: int
    normals: np.ndarray
    offsets: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    budget: float | None = None

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}")
        A = np.array(self.normals, dtype=float).reshape(-1, self.dim)
        b = np.array(self.offsets, dtype=float).reshape(-1)
        lo = np.array(self.lower, dtype=float).reshape(-1)
        hi = np.array(self.upper, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError("normals and offsets disagree in count")
        if lo.shape != (self.dim,) or hi.shape != (self.dim,):
            raise ValueError("box bounds must have one entry per coordinate")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo >= hi):
            raise ValueError("box lower bounds must be below upper bounds")
        for name, arr in (("normals", A), ("offsets", b), ("lower", lo), ("upper", hi)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.inradius <= 1e-9:
            raise ValueError("domain has no interior point")

    @classmethod
    def budget_simplex(cls, dim=2, budget=1.0) -> "Domain":
        """``{x >= 0 : sum(x) <= budget}``."""
        if budget <= 0:
            raise ValueError("budget must be positive")
        return cls(
            dim=dim,
            normals=np.ones((1, dim)),
            offsets=np.array([float(budget)]),
            lower=np.zeros(dim),
            upper=np.full(dim, float(budget)),
            budget=float(budget),
        )

    @classmethod
    def polytope(cls, normals, offsets, lower, upper) -> "Domain":
        lo = np.asarray(lower, dtype=float).reshape(-1)
        return cls(dim=lo.shape[0], normals=normals, offsets=offsets, lower=lo, upper=upper)

    @cached_property
    def vertices(self) -> np.ndarray:
        """Vertices in lexicographic order."""
        m = self.dim
        eye = np.eye(m)
        rows = np.vstack([self.normals, -eye, eye])
        rhs = np.concatenate([self.offsets, -self.lower, self.upper])
        found = []
        for combo in itertools.combinations(range(rows.shape[0]), m):
            M = rows[list(combo)]
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, rhs[list(combo)])
            if contains(self, v, 1e-9):
                found.append(np.round(v, 12) + 0.0)
        if not found:
            return np.empty((0, m))
        verts = np.unique(np.array(found), axis=0)
        return verts

    @cached_property
    def inradius(self) -> float:
        """Radius of the largest ball inside the domain (Chebyshev LP)."""
        m = self.dim
        eye = np.eye(m)
        rows = np.vstack([self.normals, -eye, eye])
        rhs = np.concatenate([self.offsets, -self.lower, self.upper])
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        res = linprog(
            c=np.r_[np.zeros(m), -1.0],
            A_ub=np.hstack([rows, norms]),
            b_ub=rhs,
            bounds=[(None, None)] * m + [(0, None)],
            method="highs",
        )
        return float(res.x[-1]) if res.status == 0 else 0.0

    @cached_property
    def centroid(self) -> np.ndarray:
        """Average of the vertices (an interior point for full-dimensional domains)."""
        return self.vertices.mean(axis=0)

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.sqrt(((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=2).max()))

    @property
    def box_volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def mask(self, points, slack=None) -> np.ndarray:
        """Vectorized membership for an ``(N, dim)`` array."""
        if slack is None:
            slack = DEFAULT_TOLERANCES.membership_slack
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return kernels.halfspace_mask(pts, self.normals, self.offsets, self.lower, self.upper, slack)


def contains(domain: Domain, x, slack=None) -> bool:
    """True iff ``x`` satisfies every constraint of ``domain`` up to ``slack``."""
    if slack is None:
        slack = DEFAULT_TOLERANCES.membership_slack
    if slack < 0:
        raise ValueError("slack must be non-negative")
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.shape[0] != domain.dim:
        raise ValueError(f"point has dimension {p.shape[0]}, domain has {domain.dim}")
    if np.any(p < domain.lower - slack) or np.any(p > domain.upper + slack):
        return False
    return bool(np.all(domain.normals @ p <= domain.offsets + slack))


def project(domain: Domain, x, tol=None) -> np.ndarray:
    """Euclidean-nearest point of ``domain`` to ``x``.

    Box clamping is exact when only box bounds bind; otherwise the squared
    distance is minimized by nested grid refinement.
    """
    from .solver import SolverConfig, maximize

    p = as_point(x, domain.dim)
    if contains(domain, p):
        return p
    clamped = np.clip(p, domain.lower, domain.upper)
    if contains(domain, clamped):
        return clamped
    if tol is None:
        tol = DEFAULT_TOLERANCES.projection_tol

    def objective(X):
        return -((X - p) ** 2).sum(axis=1)

    return maximize(objective, domain, SolverConfig(tol=tol))


def ray_extent(domain: Domain, origin, d) -> float:
    """Largest ``lam >= 0`` with ``origin + lam * d`` inside ``domain``."""
    o = as_point(origin, domain.dim)
    d = _check_direction(d, domain.dim)
    if not contains(domain, o):
        raise ValueError("ray origin lies outside the domain")
    lam = np.inf
    ad = domain.normals @ d
    room = domain.offsets - domain.normals @ o
    pos, up, down = ad > 0, d > 0, d < 0
    # a subnormal component overflows to inf: that face never binds
    with np.errstate(over="ignore"):
        if np.any(pos):
            lam = min(lam, float(np.min(room[pos] / ad[pos])))
        if np.any(up):
            lam = min(lam, float(np.min((domain.upper[up] - o[up]) / d[up])))
        if np.any(down):
            lam = min(lam, float(np.min((domain.lower[down] - o[down]) / d[down])))
    return max(lam, 0.0)


def sample(domain: Domain, count: int, seed: int, batch: int = 8192) -> np.ndarray:
    """``count`` uniform points of ``domain`` by rejection from its box.

    Deterministic in ``seed``.  Raises DegenerateInputError when the
    acceptance rate drops below 1e-4.
    """
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    out = []
    have = drawn = 0
    while have < count:
        pts = rng.uniform(domain.lower, domain.upper, size=(batch, domain.dim))
        keep = pts[domain.mask(pts, 0.0)]
        drawn += batch
        out.append(keep)
        have += keep.shape[0]
        if drawn >= 10 * batch and have / drawn < 1e-4:
            raise DegenerateInputError("rejection sampling acceptance rate below 1e-4")
    return np.vstack(out)[:count]


def lattice(domain: Domain, per_axis: int) -> np.ndarray:
    """Regular box lattice with ``per_axis`` points per coordinate, restricted to the domain."""
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(domain.lower, domain.upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    return grid[domain.mask(grid)]
