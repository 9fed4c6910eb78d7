"""Searching for profitable false declarations.

A manipulation family is a parameterized way of turning a party's true
utility into a declared one.  :func:`best_response` sweeps a family's grid,
settles with the declared profile and scores each outcome with the party's
TRUE utility.  A positive gain found by a sweep demonstrates manipulability;
finding none proves nothing about declarations outside the family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import NegolabError
from .geometry import Domain, as_point
from .methods import settle
from .pareto import ParetoSample, frontier_distance, frontier_sample
from .solver import DEFAULT_SOLVER, SolverConfig
from .utility import ConcaveQuadratic, Exponentiated, LogLinear, Scaled, Utility, check_profile, weight_vector

NO_GAIN = "no-gain"
EFFICIENT = "efficient-manipulation"
FRONTIER_MOVING = "frontier-moving-manipulation"

DEFAULT_RESOLUTION = 101


@dataclass(frozen=True)
class Scale:
    """Declare ``a * u``."""

    grid: tuple

    def __post_init__(self):
        grid = tuple(float(a) for a in self.grid)
        if not grid or min(grid) <= 0:
            raise ValueError("scale grid must be non-empty and positive")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class Exponent:
    """Declare ``(u - u(baseline)) ** alpha``; ``extend`` keeps it defined below the baseline level."""

    grid: tuple
    baseline: tuple
    extend: bool = False

    def __post_init__(self):
        grid = tuple(float(a) for a in self.grid)
        if not grid or min(grid) <= 0:
            raise ValueError("exponent grid must be non-empty and positive")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "baseline", tuple(as_point(self.baseline).tolist()))


@dataclass(frozen=True)
class WeightReplace:
    """Declare the same log-linear basis with different weights."""

    grid: tuple

    def __post_init__(self):
        grid = tuple(tuple(weight_vector(w).tolist()) for w in self.grid)
        if not grid:
            raise ValueError("weight grid must be non-empty")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class PeakShift:
    """Declare a quadratic with a different peak."""

    grid: tuple

    def __post_init__(self):
        grid = tuple(tuple(as_point(p).tolist()) for p in self.grid)
        if not grid:
            raise ValueError("peak grid must be non-empty")
        object.__setattr__(self, "grid", grid)


ManipulationFamily = Scale | Exponent | WeightReplace | PeakShift

FAMILY_KINDS = {"scale": Scale, "exponent": Exponent, "weight-replace": WeightReplace, "peak-shift": PeakShift}


def family_kind(family) -> str:
    for name, cls in FAMILY_KINDS.items():
        if isinstance(family, cls):
            return name
    raise TypeError(f"not a manipulation family: {family!r}")


def apply_manipulation(u: Utility, family, params) -> Utility:
    """The utility a party declares under ``family`` with ``params``."""
    if isinstance(family, Scale):
        return Scaled(float(params), u)
    if isinstance(family, Exponent):
        return Exponentiated(float(params), family.baseline, u, extend=family.extend)
    if isinstance(family, WeightReplace):
        if not isinstance(u, LogLinear):
            raise TypeError("weight replacement needs a log-linear utility")
        return u.with_weights(params)
    if isinstance(family, PeakShift):
        if not isinstance(u, ConcaveQuadratic):
            raise TypeError("peak shifting needs a concave quadratic utility")
        return ConcaveQuadratic(params, u.scale)
    raise TypeError(f"not a manipulation family: {family!r}")


def substitute(profile, party: int, declared: Utility) -> tuple:
    profile = check_profile(profile)
    if not 0 <= party < len(profile):
        raise IndexError(f"party {party} out of range for {len(profile)} parties")
    return profile[:party] + (declared,) + profile[party + 1 :]


def _key(params) -> tuple:
    return tuple(np.atleast_1d(np.asarray(params, dtype=float)).tolist())


def _refinements(family, best):
    """Midpoints between the best grid parameter and its nearest grid neighbours."""
    grid = [np.atleast_1d(np.asarray(p, dtype=float)) for p in family.grid]
    b = np.atleast_1d(np.asarray(best, dtype=float))
    others = sorted((float(np.linalg.norm(p - b)), _key(p)) for p in grid if not np.allclose(p, b))
    k = 2 * b.shape[0]
    mids = [0.5 * (b + np.array(p)) for _, p in others[:k]]
    scalar = isinstance(family, (Scale, Exponent))
    return [float(m[0]) if scalar else tuple(m.tolist()) for m in mids]


@dataclass
class SweepRecord:
    params: object
    outcome: np.ndarray | None
    true_gain: float
    error: str | None = None


@dataclass
class ManipulationReport:
    party: int
    family: object
    best_params: object
    truthful_outcome: np.ndarray
    manipulated_outcome: np.ndarray
    true_gain: float
    frontier_displacement: float
    frontier_tol: float
    verdict: str
    sweep: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "party": self.party,
            "family": family_kind(self.family),
            "best_params": self.best_params,
            "truthful_outcome": self.truthful_outcome.tolist(),
            "manipulated_outcome": self.manipulated_outcome.tolist(),
            "true_gain": self.true_gain,
            "frontier_displacement": self.frontier_displacement,
            "frontier_tol": self.frontier_tol,
            "verdict": self.verdict,
        }


def classify(true_gain: float, displacement: float, frontier_tol: float, gain_tol: float) -> str:
    if not true_gain > gain_tol:
        return NO_GAIN
    return EFFICIENT if displacement <= frontier_tol else FRONTIER_MOVING


def _frontier_gap(profile, declared_profile, domain, cfg, resolution, true_frontier=None):
    truth = true_frontier if true_frontier is not None else frontier_sample(profile, resolution, domain, cfg)
    lie = frontier_sample(declared_profile, resolution, domain, cfg)
    return frontier_distance(truth, lie), 2.0 * truth.spacing


def best_response(
    method,
    profile,
    party: int,
    family,
    x0,
    domain: Domain,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    refine: bool = True,
    gain_tol: float | None = None,
    resolution: int = DEFAULT_RESOLUTION,
    true_frontier: ParetoSample | None = None,
    frontier: bool = True,
) -> ManipulationReport:
    """Best declaration for ``party`` within ``family``, scored by the true utility.

    Grid points whose settlement fails are kept in the sweep with their
    error message and skipped.  With ``refine`` the midpoints between the best
    grid point and its nearest neighbours are tried as well.  Set
    ``frontier=False`` to skip the (costly) frontier comparison; the
    displacement is then reported as ``nan``.
    """
    profile = check_profile(profile)
    if gain_tol is None:
        gain_tol = DEFAULT_TOLERANCES.gain_tol
    x0 = as_point(x0, domain.dim)
    truth = profile[party]
    truthful = settle(method, profile, x0, domain, cfg)
    base = float(truth.values(truthful)[0])

    def trial(params):
        try:
            declared = substitute(profile, party, apply_manipulation(truth, family, params))
            out = settle(method, declared, x0, domain, cfg)
        except (NegolabError, ValueError, TypeError) as exc:
            return SweepRecord(params, None, -np.inf, f"{type(exc).__name__}: {exc}")
        return SweepRecord(params, out, float(truth.values(out)[0]) - base)

    def best_of(records):
        ok = [r for r in records if r.outcome is not None]
        if not ok:
            return None
        return min(ok, key=lambda r: (-r.true_gain, _key(r.params)))

    sweep = [trial(p) for p in family.grid]
    best = best_of(sweep)
    if best is None:
        raise NegolabError("settlement failed for every declaration in the grid")
    if refine and len(family.grid) > 1:
        sweep += [trial(p) for p in _refinements(family, best.params)]
        best = best_of(sweep)

    disp, tol = float("nan"), float("nan")
    if frontier:
        declared = substitute(profile, party, apply_manipulation(truth, family, best.params))
        disp, tol = _frontier_gap(profile, declared, domain, cfg, resolution, true_frontier)
    verdict = classify(best.true_gain, disp, tol, gain_tol) if frontier else (
        NO_GAIN if not best.true_gain > gain_tol else "gain"
    )
    return ManipulationReport(party, family, best.params, truthful, best.outcome, best.true_gain, disp, tol, verdict, sweep)


@dataclass(frozen=True)
class EfficiencyVerdict:
    truthful_outcome: np.ndarray
    manipulated_outcome: np.ndarray
    true_gain: float
    frontier_displacement: float
    frontier_tol: float
    verdict: str


def efficient_manipulability_check(
    method,
    profile,
    party: int,
    declared: Utility,
    x0,
    domain: Domain,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    gain_tol: float | None = None,
    resolution: int = DEFAULT_RESOLUTION,
    true_frontier: ParetoSample | None = None,
) -> EfficiencyVerdict:
    """Does declaring ``declared`` help ``party`` while leaving the Pareto set in place?"""
    profile = check_profile(profile)
    if gain_tol is None:
        gain_tol = DEFAULT_TOLERANCES.gain_tol
    lie = substitute(profile, party, declared)
    truthful = settle(method, profile, x0, domain, cfg)
    manipulated = settle(method, lie, x0, domain, cfg)
    u = profile[party]
    gain = float(u.values(manipulated)[0] - u.values(truthful)[0])
    disp, tol = _frontier_gap(profile, lie, domain, cfg, resolution, true_frontier)
    return EfficiencyVerdict(truthful, manipulated, gain, disp, tol, classify(gain, disp, tol, gain_tol))


def collude(profile, coalition, shared: Utility) -> tuple:
    """Every coalition member declares ``shared``."""
    profile = check_profile(profile)
    members = set(coalition)
    if not members:
        raise ValueError("coalition must not be empty")
    if not members <= set(range(len(profile))):
        raise IndexError("coalition names a party that does not exist")
    return tuple(shared if i in members else u for i, u in enumerate(profile))


def fold(profile, coalition, shared: Utility) -> tuple:
    """Reduced game in which the coalition acts as one party (placed last)."""
    profile = check_profile(profile)
    members = set(coalition)
    if not members:
        raise ValueError("coalition must not be empty")
    if not members <= set(range(len(profile))):
        raise IndexError("coalition names a party that does not exist")
    rest = tuple(u for i, u in enumerate(profile) if i not in members)
    if not rest:
        raise ValueError("folding every party leaves nothing to negotiate")
    return rest + (shared,)


def cobb_douglas_optimum(w: Sequence[float], budget: float = 1.0) -> np.ndarray:
    """Maximizer of ``w1 ln x1 + w2 ln x2 + w3 ln(B - x1 - x2)``."""
    w = weight_vector(w, 3)
    if not budget > 0:
        raise ValueError("budget must be positive")
    return np.array([w[0] * budget, w[1] * budget])
