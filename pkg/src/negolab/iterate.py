"""Iterated negotiation: settle repeatedly from the previous settlement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import NegotiationDefault
from .geometry import Domain, as_point, contains
from .methods import settle
from .pareto import pareto_residual
from .solver import DEFAULT_SOLVER, SolverConfig
from .utility import check_profile, feasible_measure, profile_values

STOP_REASONS = ("converged", "cycle-detected", "party-penalized", "cap-reached")

CONVERGED_RESIDUAL = 1e-3
MEASURE_NOISE = 0.02


@dataclass(frozen=True)
class IterationConfig:
    max_steps: int = 500
    revisit_tol: float = 1e-6
    penalize_tol: float = 1e-9
    measure: bool = True
    measure_samples: int = 20_000
    measure_seed: int = 0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.revisit_tol <= 0 or self.penalize_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.measure_samples < 1:
            raise ValueError("measure_samples must be positive")


DEFAULT_ITERATION = IterationConfig()


@dataclass
class Trajectory:
    points: list
    utility_values: list
    feasible_measures: list | None = None
    stop_reason: str = "cap-reached"
    rejected: np.ndarray | None = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def terminal(self) -> np.ndarray:
        return self.points[-1]


def iterate(
    method,
    profile,
    x0,
    domain: Domain,
    cfg: IterationConfig = DEFAULT_ITERATION,
    solver: SolverConfig = DEFAULT_SOLVER,
) -> Trajectory:
    """Run ``x_{t+1} = settle(method, profile, x_t)`` until a stop condition fires.

    ``method`` is a method record or any callable ``(profile, x, domain) -> point``.
    Proposals that lower some party's utility, or that come back to an
    earlier iterate, are not appended; the stop reason records why the run
    ended.  Returning to the current point at an efficient settlement counts
    as convergence rather than a cycle.
    """
    profile = check_profile(profile)
    x = as_point(x0, domain.dim)
    if not contains(domain, x):
        raise ValueError("starting point lies outside the domain")
    step: Callable = method if callable(method) else (lambda p, y, d: settle(method, p, y, d, solver))

    def measure(p):
        return feasible_measure(profile, p, domain, cfg.measure_samples, cfg.measure_seed)

    traj = Trajectory([x], [profile_values(profile, x)[:, 0]], [measure(x)] if cfg.measure else None)
    for _ in range(cfg.max_steps):
        cur, cur_vals = traj.points[-1], traj.utility_values[-1]
        try:
            nxt = as_point(step(profile, cur, domain), domain.dim)
        except NegotiationDefault:
            traj.stop_reason = "party-penalized"
            return traj
        vals = profile_values(profile, nxt)[:, 0]
        if np.any(np.isnan(vals)) or np.any(vals < cur_vals - cfg.penalize_tol):
            traj.stop_reason = "party-penalized"
            traj.rejected = nxt
            return traj
        dist = np.linalg.norm(np.array(traj.points) - nxt, axis=1)
        if dist[-1] < cfg.revisit_tol:
            efficient = pareto_residual(profile, cur, domain) <= CONVERGED_RESIDUAL
            traj.stop_reason = "converged" if efficient else "cycle-detected"
            return traj
        if np.any(dist < cfg.revisit_tol):
            traj.stop_reason = "cycle-detected"
            traj.rejected = nxt
            return traj
        traj.points.append(nxt)
        traj.utility_values.append(vals)
        if cfg.measure:
            traj.feasible_measures.append(measure(nxt))
    traj.stop_reason = "cap-reached"
    return traj


@dataclass(frozen=True)
class ConvergenceReport:
    terminal_residual: float
    measure_monotone: bool
    steps: int


def convergence_report(traj: Trajectory, profile, domain: Domain, cfg: IterationConfig = DEFAULT_ITERATION) -> ConvergenceReport:
    """Residual at the final point and monotonicity of the improving-region volumes.

    Trajectories recorded without measures get them computed here with the
    shared sample set of ``cfg``.
    """
    measures = traj.feasible_measures
    if measures is None:
        measures = [feasible_measure(profile, p, domain, cfg.measure_samples, cfg.measure_seed) for p in traj.points]
    m = np.asarray(measures, dtype=float)
    monotone = bool(np.all(np.diff(m) <= MEASURE_NOISE))
    return ConvergenceReport(pareto_residual(profile, traj.points[-1], domain), monotone, traj.steps)
