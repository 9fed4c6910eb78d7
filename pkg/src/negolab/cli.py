"""Command-line entry point: ``negolab <command> [options]``.

Exit codes: 0 success, 1 operation error, 2 invalid input, 3 a verify suite failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

import numpy as np

from .errors import NegolabError, ScenarioError
from .iterate import convergence_report, iterate
from .manipulate import FAMILY_KINDS, best_response, family_kind
from .methods import method_kind, settle
from .output import ArtifactWriter, header
from .pareto import frontier_sample, pareto_residual
from .scenario import Scenario, load_scenario
from .utility import profile_values
from .verify import SUITES, verify

OUT_ENV = "NEGOLAB_OUT"

EXIT_OK, EXIT_OPERATION, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3


def _names(prefix, count):
    return [f"{prefix}_{i + 1}" for i in range(count)]


def _apply_overrides(sc: Scenario, args) -> Scenario:
    solver = sc.solver
    changes = {}
    if args.tol is not None:
        changes["tol"] = args.tol
    if args.grid_depth is not None:
        changes["grid_depth"] = args.grid_depth
    if args.multistart is not None:
        changes["multistart"] = args.multistart
    if changes:
        try:
            solver = dataclasses.replace(solver, **changes)
        except ValueError as exc:
            raise ScenarioError(str(exc), field="solver") from exc
    sc.solver = solver
    if args.seed is not None:
        sc.seed = args.seed
    return sc


def _parse_grid(text: str, vector: bool):
    """``"0.1,0.5,2"`` for scalar families, ``"0.5:0:0.5;0.3:0.3:0.4"`` for vector ones."""
    try:
        if vector:
            return tuple(tuple(float(v) for v in item.split(":")) for item in text.split(";") if item.strip())
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ScenarioError(f"cannot parse grid {text!r}", field="--grid") from exc


def cmd_settle(sc: Scenario, out: ArtifactWriter, args) -> int:
    x = settle(sc.method, sc.profile, sc.x0, sc.domain, sc.solver)
    body = {
        "method": method_kind(sc.method),
        "point": x,
        "utilities": profile_values(sc.profile, x)[:, 0],
        "pareto_residual": pareto_residual(sc.profile, x, sc.domain),
    }
    out.json("settle.json", header(sc.echo(), sc.seed, "settle"), body)
    print("settlement:", " ".join(f"{v:.10g}" for v in x))
    return EXIT_OK


def cmd_iterate(sc: Scenario, out: ArtifactWriter, args) -> int:
    tr = iterate(sc.method, sc.profile, sc.x0, sc.domain, sc.iteration, sc.solver)
    rep = convergence_report(tr, sc.profile, sc.domain, sc.iteration)
    m, n = sc.domain.dim, len(sc.profile)
    measures = tr.feasible_measures or [float("nan")] * len(tr.points)
    rows = []
    for t, (x, u, mu) in enumerate(zip(tr.points, tr.utility_values, measures)):
        rows.append([t, *x, *u, mu, pareto_residual(sc.profile, x, sc.domain)])
    head = header(sc.echo(), sc.seed, "iterate")
    out.csv("iterate.csv", head, ["t", *_names("x", m), *_names("u", n), "measure", "residual"], rows)
    out.json(
        "iterate.json",
        head,
        {
            "stop_reason": tr.stop_reason,
            "steps": rep.steps,
            "terminal": tr.terminal,
            "terminal_residual": rep.terminal_residual,
            "measure_monotone": rep.measure_monotone,
        },
    )
    print(f"{tr.stop_reason} after {rep.steps} steps; terminal residual {rep.terminal_residual:.3g}")
    return EXIT_OK


def cmd_pareto(sc: Scenario, out: ArtifactWriter, args) -> int:
    resolution = args.resolution or sc.resolution
    ps = frontier_sample(sc.profile, resolution, sc.domain, sc.solver)
    n, m = len(sc.profile), sc.domain.dim
    rows = []
    for x, w, edge in zip(ps.points, ps.generating_weights, ps.boundary_weight):
        ws = list(w) if w is not None else [None] * n
        rows.append([*ws, *x, pareto_residual(sc.profile, x, sc.domain), edge])
    head = header(sc.echo(), sc.seed, "pareto")
    head["resolution"] = resolution
    out.csv("pareto.csv", head, [*_names("w", n), *_names("x", m), "residual", "boundary_weight"], rows)
    print(f"{len(ps)} frontier points, spacing {ps.spacing:.4g}")
    return EXIT_OK


def cmd_manipulate(sc: Scenario, out: ArtifactWriter, args) -> int:
    spec = sc.manipulation
    changes = {}
    if args.party is not None:
        changes["party"] = args.party
    if args.family is not None:
        changes["family"] = args.family
    if changes:
        spec = dataclasses.replace(spec, **changes)
    if args.grid is not None:
        spec = dataclasses.replace(spec, grid=_parse_grid(args.grid, spec.family in ("weight-replace", "peak-shift")))
    if not 0 <= spec.party < len(sc.profile):
        raise ScenarioError(f"party must be in 0..{len(sc.profile) - 1}", field="--party")
    try:
        family = spec.build(sc.x0)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc), field="manipulation") from exc
    rep = best_response(sc.method, sc.profile, spec.party, family, sc.x0, sc.domain, sc.solver, resolution=sc.resolution)
    head = header(sc.echo(), sc.seed, "manipulate")
    head["manipulation"] = {k: v for k, v in dataclasses.asdict(spec).items()}
    out.json("manipulate.json", head, rep.as_dict())
    m = sc.domain.dim
    width = len(np.atleast_1d(rep.best_params))
    rows = []
    for r in rep.sweep:
        outcome = list(r.outcome) if r.outcome is not None else [None] * m
        rows.append([*np.atleast_1d(r.params), *outcome, r.true_gain, r.error or ""])
    out.csv("manipulate_sweep.csv", head, [*_names("p", width), *_names("x", m), "true_gain", "error"], rows)
    print(f"{family_kind(family)}: best {rep.best_params}, true gain {rep.true_gain:.6g}, {rep.verdict}")
    return EXIT_OK


def _run_suites(names, seed, out: ArtifactWriter):
    ok = True
    summary = []
    for name in names:
        res = verify(name, seed)
        ok &= res.passed
        out.json(f"verify_{name}.json", header(None, seed, f"verify {name}"), res.as_dict())
        status = "PASS" if res.passed else "FAIL"
        failed = sum(not c.passed for c in res.checks)
        print(f"{status} {name}: {len(res.checks) - failed}/{len(res.checks)} checks")
        summary.append({"suite": name, "passed": res.passed, "checks": len(res.checks), "failed": failed})
    return ok, summary


def cmd_verify(args, out: ArtifactWriter) -> int:
    ok, _ = _run_suites([args.suite], args.seed, out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_report(args, out: ArtifactWriter) -> int:
    ok, summary = _run_suites(list(SUITES), args.seed, out)
    out.json("report.json", header(None, args.seed, "report"), {"passed": ok, "suites": summary})
    return EXIT_OK if ok else EXIT_VERIFY


SCENARIO_COMMANDS = {
    "settle": cmd_settle,
    "iterate": cmd_iterate,
    "pareto": cmd_pareto,
    "manipulate": cmd_manipulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="negolab", description="Abstract negotiation methods: settle, iterate, manipulate, verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV} or ./out)")
        p.add_argument("--seed", type=int, default=None, help="random seed")

    for name in SCENARIO_COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="scenario TOML file or shipped scenario name")
        p.add_argument("--tol", type=float, default=None, help="solver tolerance")
        p.add_argument("--grid-depth", type=int, default=None)
        p.add_argument("--multistart", type=int, default=None)
        common(p)
        if name == "pareto":
            p.add_argument("--resolution", type=int, default=None, help="weights per axis of the simplex grid")
        if name == "manipulate":
            p.add_argument("--party", type=int, default=None, help="manipulating party (0-based)")
            p.add_argument("--family", choices=list(FAMILY_KINDS), default=None)
            p.add_argument("--grid", default=None, help="'a,b,c' or 'w1:w2:w3;...' for vector families")

    p = sub.add_parser("verify")
    p.add_argument("suite", choices=list(SUITES))
    p.add_argument("seed_pos", nargs="?", type=int, default=None, metavar="SEED")
    common(p)
    p = sub.add_parser("report")
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out or os.environ.get(OUT_ENV) or "out")
    try:
        if args.command in SCENARIO_COMMANDS:
            sc = _apply_overrides(load_scenario(args.scenario), args)
            with ArtifactWriter(out_dir) as out:
                return SCENARIO_COMMANDS[args.command](sc, out, args)
        if args.seed is None:
            args.seed = getattr(args, "seed_pos", None) or 0
        with ArtifactWriter(out_dir) as out:
            return cmd_verify(args, out) if args.command == "verify" else cmd_report(args, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NegolabError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OPERATION


if __name__ == "__main__":
    sys.exit(main())
