"""Utility families, profiles, improving regions and continuity pseudometrics.

Every family exposes two evaluation paths:

* ``values(X)`` / ``gradients(X)`` work on ``(N, m)`` arrays and are lenient:
  points outside a family's natural region evaluate to ``-inf`` (values) or
  ``nan`` (gradients).  Solvers rely on this to treat such points as
  infeasible.
* ``u(x)`` / ``u.grad(x)`` work on a single point and raise
  :class:`~negolab.errors.DomainError` instead.

A profile is any sequence of utilities, one per party.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .config import DEFAULT_TOLERANCES
from .errors import DegenerateInputError, DomainError
from .geometry import Domain, as_point, lattice

STRICTLY_IMPROVING = "strictly-improving"
IMPROVING = "improving"
EQUIVALENT = "equivalent"
OUTSIDE = "outside"

GAIN_ROUNDING = 1e-12


def weight_vector(w, size=None) -> np.ndarray:
    """Validate a point of the probability simplex."""
    arr = np.array(w, dtype=float).reshape(-1)
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"expected {size} weights, got {arr.shape[0]}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("weights must be finite and non-negative")
    if abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1 (got {arr.sum():.12g})")
    return arr


def _rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X.reshape(1, -1) if X.ndim == 1 else X


class Utility:
    """Base class; subclasses implement ``values`` and ``gradients``."""

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> float:
        v = float(self.values(as_point(x))[0])
        if not np.isfinite(v):
            raise DomainError(f"{type(self).__name__} is undefined at {np.asarray(x).tolist()}")
        return v

    def grad(self, x) -> np.ndarray:
        g = self.gradients(as_point(x))[0]
        if not np.all(np.isfinite(g)):
            raise DomainError(f"{type(self).__name__} has no gradient at {np.asarray(x).tolist()}")
        return g


@dataclass(frozen=True, eq=False)
class Linear(Utility):
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_point(self.coeffs))

    def values(self, X):
        return _rows(X) @ self.coeffs

    def gradients(self, X):
        X = _rows(X)
        return np.broadcast_to(self.coeffs, X.shape).copy()


@dataclass(frozen=True, eq=False)
class ConcaveQuadratic(Utility):
    """``-scale * |x - peak|^2``."""

    peak: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "peak", as_point(self.peak))
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def values(self, X):
        return -self.scale * ((_rows(X) - self.peak) ** 2).sum(axis=1)

    def gradients(self, X):
        return 2.0 * self.scale * (self.peak - _rows(X))


@dataclass(frozen=True, eq=False)
class LogLinear(Utility):
    """``sum_j w_j ln(a_j . x + b_j)``; terms with zero weight are dropped."""

    coeffs: np.ndarray
    consts: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        A = np.array(self.coeffs, dtype=float)
        A = A.reshape(A.shape[0], -1)
        b = np.array(self.consts, dtype=float).reshape(-1)
        w = weight_vector(self.weights, A.shape[0])
        if b.shape[0] != A.shape[0]:
            raise ValueError("basis coefficient and constant counts differ")
        object.__setattr__(self, "coeffs", A)
        object.__setattr__(self, "consts", b)
        object.__setattr__(self, "weights", w)

    @classmethod
    def coordinates(cls, weights) -> "LogLinear":
        """Basis ``ln x_1, ..., ln x_m``."""
        w = np.asarray(weights, dtype=float)
        return cls(np.eye(w.shape[0]), np.zeros(w.shape[0]), w)

    @classmethod
    def budget_shares(cls, weights, budget=1.0) -> "LogLinear":
        """Basis ``ln x_1, ..., ln x_m, ln(B - sum x)``; ``m = len(weights) - 1``."""
        w = np.asarray(weights, dtype=float)
        m = w.shape[0] - 1
        A = np.vstack([np.eye(m), -np.ones((1, m))])
        b = np.r_[np.zeros(m), float(budget)]
        return cls(A, b, w)

    def with_weights(self, weights) -> "LogLinear":
        return LogLinear(self.coeffs, self.consts, weights)

    def _active(self):
        keep = self.weights > 0
        return self.coeffs[keep], self.consts[keep], self.weights[keep]

    def values(self, X):
        A, b, w = self._active()
        args = _rows(X) @ A.T + b
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(np.where(args > 0, args, 1.0)) @ w
        return np.where(np.all(args > 0, axis=1), out, -np.inf)

    def gradients(self, X):
        A, b, w = self._active()
        args = _rows(X) @ A.T + b
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (w / np.where(args > 0, args, np.nan)) @ A
        return g


@dataclass(frozen=True, eq=False)
class Scaled(Utility):
    """``a * inner + shift`` with ``a > 0``; a positive affine transform."""

    a: float
    inner: Utility
    shift: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("scale factor must be positive")

    def values(self, X):
        return self.a * self.inner.values(X) + self.shift

    def gradients(self, X):
        return self.a * self.inner.gradients(X)


@dataclass(frozen=True, eq=False)
class Exponentiated(Utility):
    """``(inner(x) - inner(baseline)) ** alpha``.

    The base must be non-negative.  With ``extend=True`` negative bases map
    to ``-|base| ** alpha`` instead, which keeps the declaration a strictly
    increasing transform of ``inner`` on the whole domain.
    """

    alpha: float
    baseline: np.ndarray
    inner: Utility
    extend: bool = False
    level: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("exponent must be positive")
        object.__setattr__(self, "baseline", as_point(self.baseline))
        level = float(self.inner.values(self.baseline)[0])
        if not np.isfinite(level):
            raise DomainError("inner utility is undefined at the baseline")
        object.__setattr__(self, "level", level)

    def _base(self, X):
        return self.inner.values(X) - self.level

    def values(self, X):
        base = self._base(X)
        mag = np.abs(base) ** self.alpha
        if self.extend:
            return np.where(base >= 0, mag, -mag)
        return np.where(base >= 0, mag, -np.inf)

    def gradients(self, X):
        base = self._base(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = self.alpha * np.abs(base) ** (self.alpha - 1.0)
        if not self.extend:
            factor = np.where(base >= 0, factor, np.nan)
        return factor[:, None] * self.inner.gradients(X)


@dataclass(frozen=True, eq=False)
class NegDistSq(Utility):
    """``sup_{s in D} |s - center|^2 - |x - center|^2`` (non-negative on D)."""

    center: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))

    @classmethod
    def on(cls, domain: Domain, center) -> "NegDistSq":
        c = as_point(center, domain.dim)
        offset = float(((domain.vertices - c) ** 2).sum(axis=1).max())
        return cls(c, offset)

    def values(self, X):
        return self.offset - ((_rows(X) - self.center) ** 2).sum(axis=1)

    def gradients(self, X):
        return 2.0 * (self.center - _rows(X))


# --- profiles -----------------------------------------------------------------


def evaluate(u: Utility, x) -> float:
    return u(x)


def grad(u: Utility, x) -> np.ndarray:
    return u.grad(x)


def profile_values(profile: Sequence[Utility], X) -> np.ndarray:
    """``(n, N)`` array of every party's utility at every row of ``X``."""
    X = _rows(X)
    return np.vstack([u.values(X) for u in profile])


def check_profile(profile: Sequence[Utility]) -> tuple:
    profile = tuple(profile)
    if len(profile) < 2:
        raise ValueError("a profile needs at least two parties")
    for u in profile:
        if not isinstance(u, Utility):
            raise TypeError(f"not a utility: {u!r}")
    return profile


def gain_matrix(profile, p, X):
    ref = profile_values(profile, p)[:, 0]
    vals = profile_values(profile, X)
    with np.errstate(invalid="ignore"):
        gains = vals - ref[:, None]
    # -inf - (-inf): equally undefined at both points counts as no change
    both = np.isneginf(vals) & np.isneginf(ref)[:, None]
    # batched and single-point evaluation may round differently
    noise = GAIN_ROUNDING * np.maximum(1.0, np.abs(np.where(np.isfinite(ref), ref, 0.0)))
    return np.where(both | (np.abs(gains) <= noise[:, None]), 0.0, gains)


def region_status(profile, p, x, eps=None) -> str:
    """Classify ``x`` against the improving regions anchored at ``p``."""
    if eps is None:
        eps = DEFAULT_TOLERANCES.region_eps
    gains = gain_matrix(profile, as_point(p), as_point(x))[:, 0]
    if np.all(np.abs(gains) <= eps):
        return EQUIVALENT
    if np.all(gains > eps):
        return STRICTLY_IMPROVING
    if np.all(gains >= -eps):
        return IMPROVING
    return OUTSIDE


def improving_mask(profile, p, X) -> np.ndarray:
    """Rows of ``X`` weakly preferred to ``p`` by every party."""
    return np.all(gain_matrix(profile, as_point(p), _rows(X)) >= 0, axis=0)


def feasible_measure(profile, p, domain: Domain, samples=100_000, seed=0) -> float:
    """Monte Carlo estimate of the volume of the jointly improving region at ``p``.

    The sample set depends only on ``(domain, samples, seed)``, so estimates
    for nested regions are monotone.
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(domain.lower, domain.upper, size=(samples, domain.dim))
    inside = domain.mask(X, 0.0)
    vals = profile_values(profile, X)
    ref = profile_values(profile, as_point(p, domain.dim))[:, 0]
    hits = kernels.count_dominating(vals, ref, inside)
    return domain.box_volume * hits / samples


# --- pseudometrics ------------------------------------------------------------

PSEUDOMETRIC_KINDS = ("egalitarian", "nash", "idm")


@dataclass(frozen=True, eq=False)
class PseudometricSpec:
    kind: str
    anchor1: np.ndarray
    anchor2: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        if self.kind not in PSEUDOMETRIC_KINDS:
            raise ValueError(f"unknown pseudometric kind {self.kind!r}")
        a1, a2 = as_point(self.anchor1), as_point(self.anchor2)
        if np.allclose(a1, a2):
            raise ValueError("anchors must be distinct")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 2 or grid.shape[0] == 0:
            raise ValueError("grid must be a non-empty (N, m) array")
        object.__setattr__(self, "anchor1", a1)
        object.__setattr__(self, "anchor2", a2)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def default(cls, kind, domain: Domain, per_axis=None) -> "PseudometricSpec":
        """Lattice grid; anchors at the centroid and halfway to the first vertex."""
        if per_axis is None:
            per_axis = 41 if domain.dim <= 2 else 15
        c = domain.centroid
        return cls(kind, c, 0.5 * (c + domain.vertices[0]), lattice(domain, per_axis))


def pseudometric(spec: PseudometricSpec, u: Utility, v: Utility) -> float:
    """Grid approximation of the supremum defining the chosen pseudometric."""
    G = spec.grid
    if spec.kind == "idm":
        gu, gv = u.gradients(G), v.gradients(G)
        nu, nv = np.linalg.norm(gu, axis=1), np.linalg.norm(gv, axis=1)
        floor = DEFAULT_TOLERANCES.gradient_floor
        ok = np.isfinite(nu) & np.isfinite(nv) & (nu >= floor) & (nv >= floor)
        if not np.any(ok):
            raise DegenerateInputError("every grid point has a vanishing gradient")
        cos = np.einsum("ij,ij->i", gu[ok], gv[ok]) / (nu[ok] * nv[ok])
        return float(np.clip(1.0 - cos**2, 0.0, None).max())

    anchors = np.vstack([spec.anchor1, spec.anchor2])
    ua, va = u.values(anchors), v.values(anchors)
    if not (np.all(np.isfinite(ua)) and np.all(np.isfinite(va))):
        raise DomainError("utilities must be finite at the pseudometric anchors")
    fu, fv = u.values(G), v.values(G)
    ok = np.isfinite(fu) & np.isfinite(fv)
    if not np.any(ok):
        raise DegenerateInputError("no grid point where both utilities are finite")
    fu, fv = fu[ok], fv[ok]
    if spec.kind == "egalitarian":
        diff = (fu - ua[0]) - (fv - va[0])
    else:
        diff = (va[0] - va[1]) * (fu - ua[0]) - (ua[0] - ua[1]) * (fv - va[0])
    return float(np.abs(diff).max())
