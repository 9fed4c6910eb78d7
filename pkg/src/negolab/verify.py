"""Verification suites: numerical checks of the theory's headline claims.

Each suite returns a :class:`SuiteResult` listing every check with its
claim, measured value and tolerance.  Failures are recorded, never raised.

Random instances come from ``suite_rng(seed, suite, k)``, a generator seeded
with ``[seed, crc32(suite), k]``, so suites and instances never share
streams and any single instance can be regenerated on its own.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain, sample
from .iterate import IterationConfig, convergence_report, iterate
from .manipulate import (
    Exponent,
    Scale,
    WeightReplace,
    best_response,
    efficient_manipulability_check,
)
from .methods import IDM, Egalitarian, LogBarrierWeighted, Nash, ParetoInvariant, settle
from .pareto import frontier_sample, pareto_residual
from .utility import (
    ConcaveQuadratic,
    Exponentiated,
    Linear,
    LogLinear,
    PseudometricSpec,
    Scaled,
    profile_values,
    pseudometric,
)

SCALE_GRID = (0.1, 0.25, 0.5, 1.0, 2.0)
WIDE_SCALE_GRID = (0.001, 0.01, 0.03, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0)
WIDE_EXPONENT_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
UNIT_SIMPLEX = Domain.budget_simplex(2, 1.0)


@dataclass
class Check:
    claim: str
    measured: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return {"claim": self.claim, "measured": self.measured, "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class SuiteResult:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def at_most(self, claim, measured, tol):
        self.checks.append(Check(claim, float(measured), float(tol), bool(measured <= tol)))

    def above(self, claim, measured, tol):
        self.checks.append(Check(claim, float(measured), float(tol), bool(measured > tol)))

    def holds(self, claim, ok: bool):
        self.checks.append(Check(claim, float(ok), 1.0, bool(ok)))

    def as_dict(self):
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def suite_rng(seed: int, suite: str, k: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(suite.encode()), k])


def random_quadratic_scenario(rng, domain=UNIT_SIMPLEX, n=2, min_conflict=0.05):
    """Concave quadratic profile with random peaks and curvatures, and a non-efficient start.

    Every party must lose at least ``min_conflict`` at any other party's peak;
    with nearly coincident peaks no declaration can move a party's utility by
    more than the gain tolerance, and such draws say nothing about manipulability.
    """
    while True:
        peaks = sample(domain, n, int(rng.integers(2**31)))
        scales = rng.uniform(0.5, 2.0, n)
        profile = tuple(ConcaveQuadratic(p, s) for p, s in zip(peaks, scales))
        x0 = sample(domain, 1, int(rng.integers(2**31)))[0]
        loss = -profile_values(profile, peaks)
        np.fill_diagonal(loss, np.inf)
        if loss.min() >= min_conflict and pareto_residual(profile, x0, domain) > 1e-6:
            return profile, x0


def cobb_douglas_pair():
    return (LogLinear.coordinates([1.0, 0.0]), LogLinear.coordinates([0.0, 1.0]))


def linear_pair():
    return (Linear([1.0, 0.0]), Linear([0.0, 1.0]))


def quadratic_pair():
    return (ConcaveQuadratic([1.0, 0.0]), ConcaveQuadratic([0.0, 1.0]))


def swap_coordinates(profile, x, domain):
    """A deliberately cyclic toy method."""
    return np.asarray(x, dtype=float)[::-1].copy()


# --- suites ------------------------------------------------------------------


def suite_limit(seed: int) -> SuiteResult:
    res = SuiteResult("limit", seed)
    D = UNIT_SIMPLEX
    cfg = IterationConfig(max_steps=200)
    cd = cobb_douglas_pair()
    starts = sample(D, 20, int(suite_rng(seed, "limit", 0).integers(2**31)))
    for k, x0 in enumerate(starts):
        tr = iterate(IDM(), cd, x0, D, cfg)
        rep = convergence_report(tr, cd, D, cfg)
        res.at_most(f"Cobb-Douglas IDM run {k}: terminal residual", rep.terminal_residual, 1e-3)
        res.at_most(f"Cobb-Douglas IDM run {k}: steps", rep.steps, 200)
        res.holds(f"Cobb-Douglas IDM run {k}: improving-region volume non-increasing", rep.measure_monotone)
    for k in range(20):
        profile, x0 = random_quadratic_scenario(suite_rng(seed, "limit", k + 1))
        tr = iterate(IDM(), profile, x0, D, cfg)
        rep = convergence_report(tr, profile, D, cfg)
        res.at_most(f"quadratic IDM scenario {k}: terminal residual", rep.terminal_residual, 1e-3)
        res.holds(f"quadratic IDM scenario {k}: improving-region volume non-increasing", rep.measure_monotone)
    symmetric = (LogLinear.coordinates([0.5, 0.5]), ConcaveQuadratic([1 / 3, 1 / 3]))
    tr = iterate(swap_coordinates, symmetric, [0.2, 0.4], D, cfg)
    res.holds("cyclic toy method stops with cycle-detected", tr.stop_reason == "cycle-detected")
    return res


def _best_gain(method, profile, family_for, x0, D):
    gains = []
    for party in range(len(profile)):
        rep = best_response(method, profile, party, family_for(x0), x0, D, frontier=False)
        gains.append(rep.true_gain)
    return max(gains)


def suite_manipulability(seed: int) -> SuiteResult:
    res = SuiteResult("manipulability", seed)
    D = UNIT_SIMPLEX
    methods = [
        (Egalitarian(), lambda x0: Scale(WIDE_SCALE_GRID)),
        (Nash(), lambda x0: Exponent(WIDE_EXPONENT_GRID, tuple(x0), extend=True)),
        (LogBarrierWeighted((0.5, 0.5)), lambda x0: Scale(WIDE_SCALE_GRID)),
    ]
    for k in range(5):
        profile, x0 = random_quadratic_scenario(suite_rng(seed, "manipulability", k))
        for method, fam in methods:
            name = type(method).__name__
            res.above(f"{name}, scenario {k}: best true gain over both parties", _best_gain(method, profile, fam, x0, D), 1e-3)
    rep = best_response(Nash(), linear_pair(), 0, Scale(SCALE_GRID), [0, 0], D, frontier=False)
    res.at_most("Nash under the Scale family: true gain", rep.true_gain, 1e-3)
    return res


def suite_efficient_manipulation(seed: int) -> SuiteResult:
    res = SuiteResult("efficient-manipulation", seed)
    D = UNIT_SIMPLEX
    lin = linear_pair()
    rep = best_response(Egalitarian(), lin, 0, Scale(SCALE_GRID), [0, 0], D, refine=False, frontier=False)
    for rec in rep.sweep:
        a = rec.params
        res.at_most(f"Egalitarian, declared scale {a}: |x_1 - 1/(1+a)|", abs(rec.outcome[0] - 1 / (1 + a)), 1e-3)
    at_01 = next(r for r in rep.sweep if r.params == 0.1)
    res.at_most("Egalitarian, scale 0.1: |true gain - 0.409|", abs(at_01.true_gain - 0.409), 2e-3)

    nash = best_response(Nash(), lin, 0, Exponent((2.0,), (0.0, 0.0)), [0, 0], D, frontier=False)
    res.at_most("Nash, exponent 2: |x - (2/3, 1/3)|", np.abs(nash.manipulated_outcome - [2 / 3, 1 / 3]).max(), 1e-3)
    res.at_most("Nash, exponent 2: |true gain - 1/6|", abs(nash.true_gain - 1 / 6), 2e-3)
    scale = best_response(Nash(), lin, 0, Scale(SCALE_GRID), [0, 0], D, frontier=False)
    res.at_most("Nash, Scale family: true gain", scale.true_gain, 1e-3)

    quad = quadratic_pair()
    truth = frontier_sample(quad, 101, D)
    x0 = (0.0, 0.0)
    for method, family in ((Egalitarian(), Scale(SCALE_GRID)), (Nash(), Exponent((1.0, 2.0, 4.0), x0, extend=True))):
        rep = best_response(method, quad, 0, family, x0, D, true_frontier=truth)
        name = type(method).__name__
        res.above(f"{name} on quadratics: best true gain", rep.true_gain, 1e-3)
        res.at_most(f"{name} on quadratics: frontier displacement (tol = 2x spacing)", rep.frontier_displacement, rep.frontier_tol)
    return res


def preference_preserving_transforms(u, rng, count=10, low_point=(0.0, 1.0)):
    """Positive affine maps and increasing powers of ``u`` above its minimum on the domain."""
    out = []
    for k in range(count):
        if k % 3 == 0:
            out.append(Scaled(float(rng.uniform(0.05, 20.0)), u, float(rng.uniform(-5, 5))))
        elif k % 3 == 1:
            out.append(Exponentiated(float(rng.uniform(0.3, 4.0)), low_point, u))
        else:
            out.append(Exponentiated(float(rng.uniform(0.3, 4.0)), low_point, Scaled(float(rng.uniform(0.1, 10)), u), extend=True))
    return out


def suite_pareto_invariance(seed: int) -> SuiteResult:
    res = SuiteResult("pareto-invariance", seed)
    D = UNIT_SIMPLEX
    quad = quadratic_pair()
    x0 = np.zeros(2)
    base = settle(ParetoInvariant(), quad, x0, D)
    res.at_most("truthful settlement: |x - (0.5, 0.5)|", np.abs(base - 0.5).max(), 1e-3)
    rng = suite_rng(seed, "pareto-invariance")
    for k, declared in enumerate(preference_preserving_transforms(quad[0], rng)):
        out = settle(ParetoInvariant(), (declared, quad[1]), x0, D)
        res.at_most(f"transform {k}: settlement displacement", np.linalg.norm(out - base), 1e-3)
        res.at_most(f"transform {k}: true gain", quad[0](out) - quad[0](base), 1e-3)
    return res


def perfect_competition_profile(a=0.6, b=0.6):
    return (LogLinear.budget_shares([a, 0.0, 1.0 - a]), LogLinear.budget_shares([0.0, b, 1.0 - b]))


def simplex_weight_grid(step=0.1):
    n = int(round(1 / step))
    return tuple((i / n, j / n, (n - i - j) / n) for i in range(n + 1) for j in range(n + 1 - i))


def suite_weak_inefficiency(seed: int) -> SuiteResult:
    res = SuiteResult("weak-inefficiency", seed)
    D = UNIT_SIMPLEX
    profile = perfect_competition_profile()
    x0 = (0.2, 0.2)
    truth = frontier_sample(profile, 101, D)
    for method in (Egalitarian(), Nash()):
        name = type(method).__name__
        sweep = best_response(method, profile, 0, WeightReplace(simplex_weight_grid()), x0, D, refine=False, frontier=False)
        gainful = [r for r in sweep.sweep if r.outcome is not None and r.true_gain > 1e-3]
        res.above(f"{name}: gainful declarations found inside U'", len(gainful), 0)
        for r in gainful:
            v = efficient_manipulability_check(method, profile, 0, profile[0].with_weights(r.params), x0, D, true_frontier=truth)
            res.above(f"{name}, declared weights {r.params}: frontier displacement", v.frontier_displacement, 0.01)
        best_inside = max((r.true_gain for r in gainful), default=0.0)
        esc = best_response(method, profile, 0, Exponent((2.0, 4.0, 8.0, 16.0, 32.0, 64.0), x0, extend=True), x0, D, true_frontier=truth)
        res.holds(f"{name}: exponent escape gain {esc.true_gain:.6g} >= best in-U' gain {best_inside:.6g}", esc.true_gain >= best_inside)
        res.at_most(f"{name}: exponent escape frontier displacement (tol = 2x spacing)", esc.frontier_displacement, esc.frontier_tol)
    return res


def _perturb(u, rng, kind, spec, budget=1e-3):
    """Peak shift of a quadratic, halved until the pseudometric drops below ``budget``."""
    d = rng.normal(size=u.peak.shape)
    d /= np.linalg.norm(d)
    step = 1e-3
    for _ in range(60):
        v = ConcaveQuadratic(u.peak + step * d, u.scale)
        mu = pseudometric(spec, u, v)
        if mu <= budget:
            return v, mu
        step /= 2
    return u, 0.0


def suite_continuity(seed: int) -> SuiteResult:
    res = SuiteResult("continuity", seed)
    D = UNIT_SIMPLEX
    quad = quadratic_pair()
    u = quad[0]
    specs = {k: PseudometricSpec.default(k, D) for k in ("egalitarian", "nash", "idm")}

    res.at_most("translation invariance of the egalitarian pseudometric", pseudometric(specs["egalitarian"], u, Scaled(1.0, u, 3.7)), 1e-12)
    res.at_most("affine invariance of the Nash pseudometric", pseudometric(specs["nash"], u, Scaled(2.5, u, -1.3)), 1e-12)
    res.at_most(
        "monotone rescaling invariance of the IDM pseudometric",
        pseudometric(specs["idm"], u, Exponentiated(2.0, (0.0, 1.0), u)),
        1e-12,
    )

    cases = (("egalitarian", Egalitarian(), (0.0, 0.0)), ("nash", Nash(), (0.0, 0.0)), ("idm", IDM(), (0.1, 0.1)))
    for kind, method, x0 in cases:
        base = settle(method, quad, x0, D)
        rng = suite_rng(seed, "continuity", len(kind))
        for k in range(10):
            v, mu = _perturb(u, rng, kind, specs[kind])
            out = settle(method, (v, quad[1]), x0, D)
            res.at_most(f"{kind} pair {k} (mu = {mu:.3g}): settlement displacement", np.linalg.norm(out - base), 0.1)
    return res


SUITES = {
    "limit": suite_limit,
    "manipulability": suite_manipulability,
    "efficient-manipulation": suite_efficient_manipulation,
    "pareto-invariance": suite_pareto_invariance,
    "weak-inefficiency": suite_weak_inefficiency,
    "continuity": suite_continuity,
}


def verify(suite: str, seed: int = 0) -> SuiteResult:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return SUITES[suite](seed)
