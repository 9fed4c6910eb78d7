"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import filecmp
import subprocess
import sys

import numpy as np
import pytest

from negolab.geometry import Domain, sample
from negolab.iterate import IterationConfig, convergence_report, iterate
from negolab.manipulate import Exponent, Scale, WeightReplace, best_response, efficient_manipulability_check
from negolab.methods import IDM, Egalitarian, LogBarrierWeighted, Nash, ParetoInvariant, settle
from negolab.pareto import frontier_distance, frontier_sample, pareto_residual, weighting_solution
from negolab.scenario import load_scenario, shipped_scenarios
from negolab.solver import line_argmax, maximize
from negolab.utility import (
    ConcaveQuadratic,
    Exponentiated,
    Linear,
    LogLinear,
    PseudometricSpec,
    Scaled,
    pseudometric,
)
from tests import oracles

D = Domain.budget_simplex(2, 1.0)
LIN = (Linear([1.0, 0.0]), Linear([0.0, 1.0]))
CD = (LogLinear.coordinates([1.0, 0.0]), LogLinear.coordinates([0.0, 1.0]))
QUAD = (ConcaveQuadratic([1.0, 0.0]), ConcaveQuadratic([0.0, 1.0]))
SCALE_GRID = (0.1, 0.25, 0.5, 1.0, 2.0)


def test_criterion_01_symmetric_settlements(record_criterion):
    errs = {type(m).__name__: float(np.abs(settle(m, LIN, [0, 0], D) - 0.5).max()) for m in (Egalitarian(), Nash())}
    ok = max(errs.values()) <= 1e-4
    record_criterion(1, "symmetric settlements at (0.5, 0.5)", ok, f"max error {max(errs.values()):.2e}")
    assert ok, errs


def test_criterion_02_weighting_matches_cobb_douglas(record_criterion):
    rng = np.random.default_rng(2)
    errs = []
    for _ in range(10):
        w1 = rng.uniform(0.05, 0.95)
        w = (w1, 1 - w1)
        errs.append(np.abs(weighting_solution(CD, w, D) - oracles.cobb_douglas(w)).max())
    ok = max(errs) <= 1e-3
    record_criterion(2, "weighting method matches Cobb-Douglas closed form", ok, f"max error {max(errs):.2e}")
    assert ok


def test_criterion_03_limit_theorem(record_criterion):
    cfg = IterationConfig(max_steps=200)
    worst, monotone, converged = 0.0, True, True
    for x0 in sample(D, 20, 303):
        tr = iterate(IDM(), CD, x0, D, cfg)
        rep = convergence_report(tr, CD, D, cfg)
        worst = max(worst, rep.terminal_residual)
        monotone &= rep.measure_monotone
        converged &= tr.stop_reason == "converged" and tr.steps <= 200
    ok = worst <= 1e-3 and monotone and converged
    record_criterion(3, "IDM limit from 20 starts", ok, f"worst residual {worst:.2e}, monotone {monotone}")
    assert ok


def test_criterion_04_egalitarian_manipulation(record_criterion):
    rep = best_response(Egalitarian(), LIN, 0, Scale(SCALE_GRID), [0, 0], D, refine=False, frontier=False)
    errs = [abs(r.outcome[0] - oracles.egalitarian_scaled_linear(r.params)) for r in rep.sweep]
    gain = next(r.true_gain for r in rep.sweep if r.params == 0.1)
    ok = max(errs) <= 1e-3 and abs(gain - 0.409) <= 2e-3
    record_criterion(4, "egalitarian scale sweep follows 1/(1+a)", ok, f"max error {max(errs):.2e}, gain {gain:.5f}")
    assert ok


def test_criterion_05_nash_manipulation(record_criterion):
    exp = best_response(Nash(), LIN, 0, Exponent((2.0,), (0.0, 0.0)), [0, 0], D, frontier=False)
    expected = oracles.nash_power_linear(2.0)
    err = np.abs(exp.manipulated_outcome - [expected, 1 - expected]).max()
    truthful_gain = exp.true_gain
    scale = best_response(Nash(), LIN, 0, Scale(SCALE_GRID), [0, 0], D, frontier=False)
    ok = err <= 1e-3 and abs(truthful_gain - 1 / 6) <= 2e-3 and scale.true_gain <= 1e-3
    record_criterion(
        5, "nash exponent and scale manipulation", ok, f"outcome error {err:.2e}, gain {truthful_gain:.5f}, scale gain {scale.true_gain:.1e}"
    )
    assert ok


def test_criterion_06_efficient_manipulability(record_criterion):
    x0 = (0.0, 0.0)
    truth = frontier_sample(QUAD, 101, D)
    cases = ((Egalitarian(), Scale(SCALE_GRID)), (Nash(), Exponent((1.0, 2.0, 4.0), x0, extend=True)))
    worst = 0.0
    ok = True
    for method, family in cases:
        rep = best_response(method, QUAD, 0, family, x0, D, true_frontier=truth)
        ratio = rep.frontier_displacement / (2 * truth.spacing)
        worst = max(worst, ratio)
        ok &= rep.true_gain > 1e-3 and rep.frontier_displacement <= 2 * truth.spacing
    record_criterion(6, "best scale/exponent declarations keep the frontier", ok, f"displacement / tolerance {worst:.3f}")
    assert ok


def test_criterion_07_pareto_invariance(record_criterion):
    sc = load_scenario("pareto_invariant_quadratic")
    base = settle(ParetoInvariant(), sc.profile, sc.x0, sc.domain)
    u = sc.profile[0]
    rng = np.random.default_rng(7)
    transforms = []
    for k in range(10):
        if k % 2 == 0:
            transforms.append(Scaled(rng.uniform(0.05, 20), u, rng.uniform(-5, 5)))
        else:
            transforms.append(Exponentiated(rng.uniform(0.3, 4.0), (0.0, 1.0), u))
    disp, gain = 0.0, -np.inf
    for v in transforms:
        out = settle(ParetoInvariant(), (v, sc.profile[1]), sc.x0, sc.domain)
        disp = max(disp, float(np.linalg.norm(out - base)))
        gain = max(gain, float(u(out) - u(base)))
    ok = np.abs(base - 0.5).max() <= 1e-3 and disp <= 1e-3 and gain <= 1e-3
    record_criterion(7, "pareto-invariant settlement ignores preference-preserving declarations", ok, f"displacement {disp:.1e}, gain {gain:.1e}")
    assert ok


def test_criterion_08_weak_inefficiency(record_criterion):
    truth_profile = (LogLinear.budget_shares([0.6, 0.0, 0.4]), LogLinear.budget_shares([0.0, 0.6, 0.4]))
    x0 = (0.2, 0.2)
    truth = frontier_sample(truth_profile, 101, D)
    weights = tuple((i / 10, j / 10, (10 - i - j) / 10) for i in range(11) for j in range(11 - i))
    sweep = best_response(Egalitarian(), truth_profile, 0, WeightReplace(weights), x0, D, refine=False, frontier=False)
    gainful = [r for r in sweep.sweep if r.outcome is not None and r.true_gain > 1e-3]
    moved = [
        efficient_manipulability_check(
            Egalitarian(), truth_profile, 0, truth_profile[0].with_weights(r.params), x0, D, true_frontier=truth
        ).frontier_displacement
        for r in gainful
    ]
    best_inside = max(r.true_gain for r in gainful)
    escape = best_response(
        Egalitarian(), truth_profile, 0, Exponent((2.0, 4.0, 8.0, 16.0, 32.0, 64.0), x0, extend=True), x0, D, true_frontier=truth
    )
    ok = (
        bool(gainful)
        and min(moved) > 0.01
        and escape.true_gain >= best_inside
        and escape.frontier_displacement <= 2 * truth.spacing
    )
    record_criterion(
        8,
        "restricted-space manipulations move the frontier, escape does not",
        ok,
        f"{len(gainful)} gainful in-U', min displacement {min(moved):.3f}; escape gain {escape.true_gain:.4f} vs {best_inside:.4f}",
    )
    assert ok


def _random_concave_scenario(rng):
    while True:
        peaks = rng.dirichlet(np.ones(3), size=2)[:, :2] * rng.uniform(0.6, 1.0)
        profile = tuple(ConcaveQuadratic(p, rng.uniform(0.5, 2.0)) for p in peaks)
        x0 = rng.dirichlet(np.ones(3))[:2] * rng.uniform(0.0, 1.0)
        # contested: each party loses at least 0.05 at the other's peak
        conflict = min(-profile[0](peaks[1]), -profile[1](peaks[0]))
        if conflict >= 0.05 and pareto_residual(profile, x0, D) > 1e-6:
            return profile, x0


def test_criterion_09_two_party_manipulability(record_criterion):
    rng = np.random.default_rng(9)
    scenarios = [_random_concave_scenario(rng) for _ in range(5)]
    scales = Scale((0.001, 0.01, 0.03, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0))
    worst = np.inf
    for method in (Egalitarian(), Nash(), LogBarrierWeighted((0.5, 0.5))):
        for profile, x0 in scenarios:
            families = (scales, Exponent((1.0, 2.0, 4.0, 8.0, 16.0, 32.0), x0, extend=True))
            best = max(
                best_response(method, profile, party, fam, x0, D, frontier=False).true_gain
                for party in (0, 1)
                for fam in families
            )
            worst = min(worst, best)
    ok = worst > 1e-3
    record_criterion(9, "every efficient method is manipulable on 5 scenarios", ok, f"smallest best gain {worst:.4f}")
    assert ok


def test_criterion_10_solver_oracles(record_criterion):
    rng = np.random.default_rng(10)
    obj_gap = 0.0
    for _ in range(20):
        u = ConcaveQuadratic(rng.uniform(-0.5, 1.5, 2), rng.uniform(0.2, 5.0))
        c = rng.uniform(-1, 1, 2)

        def f(X, u=u, c=c):
            return u.values(X) + X @ c

        best, _ = oracles.brute_force_max(f)
        obj_gap = max(obj_gap, best - f(maximize(f, D)[None])[0])
    line_gap = 0.0
    for _ in range(5):
        u = ConcaveQuadratic(rng.uniform(-1, 2, 2))
        o = np.array([0.2, 0.3])
        theta = rng.uniform(0, 2 * np.pi)
        d = np.array([np.cos(theta), np.sin(theta)])
        lam_max = rng.uniform(0.05, 1.0)
        ref = oracles.scan_line_argmax(lambda L: u.values(o + L[:, None] * d), lam_max)
        line_gap = max(line_gap, abs(line_argmax(u, o, d, lam_max) - ref))
    ok = obj_gap <= 1e-3 and line_gap <= 1e-5
    record_criterion(10, "solver agrees with brute force and line scans", ok, f"objective gap {obj_gap:.1e}, line gap {line_gap:.1e}")
    assert ok


def test_criterion_11_pseudometric_invariances_and_continuity(record_criterion):
    u, other = QUAD
    specs = {k: PseudometricSpec.default(k, D) for k in ("egalitarian", "nash", "idm")}
    inv = max(
        pseudometric(specs["egalitarian"], u, Scaled(1.0, u, 2.5)),
        pseudometric(specs["nash"], u, Scaled(3.0, u, -0.7)),
        pseudometric(specs["idm"], u, Exponentiated(3.0, (0.0, 1.0), u)),
    )
    rng = np.random.default_rng(11)
    disp = 0.0
    for kind, method, x0 in (("egalitarian", Egalitarian(), (0, 0)), ("nash", Nash(), (0, 0)), ("idm", IDM(), (0.1, 0.1))):
        base = settle(method, QUAD, x0, D)
        for _ in range(10):
            d = rng.normal(size=2)
            d /= np.linalg.norm(d)
            step = 1e-3
            v = ConcaveQuadratic(u.peak + step * d, u.scale)
            while pseudometric(specs[kind], u, v) > 1e-3:
                step /= 2
                v = ConcaveQuadratic(u.peak + step * d, u.scale)
            disp = max(disp, float(np.linalg.norm(settle(method, (v, other), x0, D) - base)))
    ok = inv <= 1e-12 and disp <= 0.1
    record_criterion(11, "pseudometric invariances and empirical continuity", ok, f"invariance {inv:.1e}, displacement {disp:.1e}")
    assert ok


CLI_RUNS = [
    ["settle", "--scenario", "nash_budget"],
    ["iterate", "--scenario", "idm_quadratic"],
    ["pareto", "--scenario", "nash_budget", "--resolution", "21"],
    ["manipulate", "--scenario", "egalitarian_linear"],
    ["verify", "continuity", "42"],
    ["verify", "pareto-invariance", "42"],
]


def _run_cli(args, out):
    proc = subprocess.run([sys.executable, "-m", "negolab.cli", *args, "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return sorted(p.name for p in out.iterdir())


def test_criterion_12_reproducible_artifacts(record_criterion, tmp_path):
    runs = CLI_RUNS + [["settle", "--scenario", name, "--seed", "5"] for name in shipped_scenarios()]
    mismatched = []
    for k, args in enumerate(runs):
        a, b = tmp_path / f"{k}a", tmp_path / f"{k}b"
        files = _run_cli(args, a)
        assert files == _run_cli(args, b)
        _, diff, errors = filecmp.cmpfiles(a, b, files, shallow=False)
        if diff or errors:
            mismatched.append((args, diff + errors))
    ok = not mismatched
    record_criterion(12, "CLI artifacts are byte-identical across runs", ok, f"{len(runs)} invocations, {len(mismatched)} mismatched")
    assert ok, mismatched
