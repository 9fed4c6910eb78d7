"""Scenario files: one TOML document describing a negotiation experiment.

Example::

    seed = 42
    x0 = [0.0, 0.0]

    [domain]
    kind = "simplex"
    dim = 2
    budget = 1.0

    [[party]]
    family = "loglinear"
    basis = "coordinates"
    weights = [1.0, 0.0]

    [[party]]
    family = "loglinear"
    basis = "coordinates"
    weights = [0.0, 1.0]

    [method]
    kind = "nash"

Optional tables ``[solver]``, ``[iteration]``, ``[pareto]`` and
``[manipulation]`` override defaults.  Every validation error names the
offending field and, where it can be found, its line in the file.
"""

from __future__ import annotations

import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ScenarioError
from .geometry import Domain, contains
from .iterate import IterationConfig
from .manipulate import FAMILY_KINDS, Exponent, PeakShift, Scale, WeightReplace
from .methods import (
    IDM,
    Dictatorial,
    Dummy,
    Egalitarian,
    LogBarrierWeighted,
    Nash,
    ParetoInvariant,
    WeightedLagrange,
    check_arity,
    method_kind,
)
from .solver import SolverConfig
from .utility import ConcaveQuadratic, Exponentiated, Linear, LogLinear, NegDistSq, Scaled, Utility

SCENARIO_DIR = Path(__file__).parent / "scenarios"

PARTY_FAMILIES = ("linear", "quadratic", "loglinear", "negdistsq", "scaled", "exponentiated")


@dataclass(frozen=True)
class ManipulationSpec:
    party: int = 0
    family: str = "scale"
    grid: tuple = (0.1, 0.25, 0.5, 1.0, 2.0)
    baseline: tuple | None = None
    extend: bool = False

    def build(self, x0) -> object:
        if self.family == "scale":
            return Scale(self.grid)
        if self.family == "exponent":
            return Exponent(self.grid, self.baseline if self.baseline is not None else tuple(x0), self.extend)
        if self.family == "weight-replace":
            return WeightReplace(self.grid)
        return PeakShift(self.grid)


@dataclass(eq=False)
class Scenario:
    name: str
    domain: Domain
    profile: tuple
    method: object
    x0: np.ndarray
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    iteration: IterationConfig = field(default_factory=IterationConfig)
    resolution: int = 101
    manipulation: ManipulationSpec = field(default_factory=ManipulationSpec)
    parties: list = field(default_factory=list)
    domain_spec: dict = field(default_factory=dict)
    method_spec: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Fully resolved description, defaults included."""
        return {
            "name": self.name,
            "seed": self.seed,
            "x0": self.x0.tolist(),
            "domain": self.domain_spec,
            "party": self.parties,
            "method": self.method_spec,
            "solver": asdict(self.solver),
            "iteration": asdict(self.iteration),
            "pareto": {"resolution": self.resolution},
            "manipulation": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.manipulation).items()},
        }


class _Locator:
    """Maps ``table.key`` paths to line numbers in the source text."""

    def __init__(self, text: str):
        self.lines = {}
        table, counts = "", {}
        for no, line in enumerate(text.splitlines(), start=1):
            s = line.strip()
            m = re.match(r"^\[\[\s*([\w.-]+)\s*\]\]", s)
            if m:
                name = m.group(1)
                idx = counts.get(name, 0)
                counts[name] = idx + 1
                table = f"{name}[{idx}]"
                self.lines.setdefault(table, no)
                continue
            m = re.match(r"^\[\s*([\w.-]+)\s*\]", s)
            if m:
                table = m.group(1)
                self.lines.setdefault(table, no)
                continue
            m = re.match(r"^([\w-]+)\s*=", s)
            if m:
                key = f"{table}.{m.group(1)}" if table else m.group(1)
                self.lines.setdefault(key, no)

    def __call__(self, path: str):
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path.rpartition(".")[0]
        return None


def _fail(loc, path, msg):
    raise ScenarioError(msg, field=path, line=loc(path))


def _floats(loc, path, value, size=None):
    try:
        arr = np.array(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        _fail(loc, path, "expected a list of numbers")
    if size is not None and arr.shape[0] != size:
        _fail(loc, path, f"expected {size} numbers, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        _fail(loc, path, "numbers must be finite")
    return arr


def _weights(loc, path, value, size=None):
    w = _floats(loc, path, value, size)
    if np.any(w < 0):
        _fail(loc, path, "weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-9:
        _fail(loc, path, f"weights must sum to 1 (got {w.sum():.12g})")
    return w


def _known(loc, path, table: dict, allowed):
    extra = sorted(set(table) - set(allowed))
    if extra:
        _fail(loc, f"{path}.{extra[0]}", f"unknown key {extra[0]!r}")


def _domain(loc, spec):
    if not isinstance(spec, dict):
        _fail(loc, "domain", "missing [domain] table")
    kind = spec.get("kind", "simplex")
    if kind in ("simplex", "budget-simplex"):
        _known(loc, "domain", spec, ("kind", "dim", "budget"))
        dim, budget = int(spec.get("dim", 2)), float(spec.get("budget", 1.0))
        try:
            return Domain.budget_simplex(dim, budget), {"kind": kind, "dim": dim, "budget": budget}
        except ValueError as exc:
            _fail(loc, "domain", str(exc))
    if kind == "polytope":
        _known(loc, "domain", spec, ("kind", "normals", "offsets", "lower", "upper"))
        for key in ("normals", "offsets", "lower", "upper"):
            if key not in spec:
                _fail(loc, f"domain.{key}", "required for a polytope domain")
        lower = _floats(loc, "domain.lower", spec["lower"])
        upper = _floats(loc, "domain.upper", spec["upper"], lower.shape[0])
        offsets = _floats(loc, "domain.offsets", spec["offsets"])
        normals = _floats(loc, "domain.normals", spec["normals"], offsets.shape[0] * lower.shape[0])
        try:
            d = Domain.polytope(normals.reshape(-1, lower.shape[0]), offsets, lower, upper)
        except ValueError as exc:
            _fail(loc, "domain", str(exc))
        echo = {
            "kind": kind,
            "normals": d.normals.tolist(),
            "offsets": d.offsets.tolist(),
            "lower": d.lower.tolist(),
            "upper": d.upper.tolist(),
        }
        return d, echo
    _fail(loc, "domain.kind", f"unknown domain kind {kind!r}")


def _party(loc, path, spec, domain) -> tuple[Utility, dict]:
    m = domain.dim
    if not isinstance(spec, dict):
        _fail(loc, path, "expected a table")
    fam = spec.get("family")
    if fam not in PARTY_FAMILIES:
        _fail(loc, f"{path}.family", f"family must be one of {', '.join(PARTY_FAMILIES)}")
    if fam == "linear":
        _known(loc, path, spec, ("family", "coeffs"))
        c = _floats(loc, f"{path}.coeffs", spec.get("coeffs"), m)
        return Linear(c), {"family": fam, "coeffs": c.tolist()}
    if fam == "quadratic":
        _known(loc, path, spec, ("family", "peak", "scale"))
        p = _floats(loc, f"{path}.peak", spec.get("peak"), m)
        s = float(spec.get("scale", 1.0))
        if not s > 0:
            _fail(loc, f"{path}.scale", "scale must be positive")
        return ConcaveQuadratic(p, s), {"family": fam, "peak": p.tolist(), "scale": s}
    if fam in ("scaled", "exponentiated"):
        if not isinstance(spec.get("inner"), dict):
            _fail(loc, f"{path}.inner", "a wrapped utility needs an 'inner' table")
        inner, inner_echo = _party(loc, f"{path}.inner", spec["inner"], domain)
        if fam == "scaled":
            _known(loc, path, spec, ("family", "a", "shift", "inner"))
            a, shift = float(spec.get("a", 1.0)), float(spec.get("shift", 0.0))
            if not a > 0:
                _fail(loc, f"{path}.a", "scale factor must be positive")
            return Scaled(a, inner, shift), {"family": fam, "a": a, "shift": shift, "inner": inner_echo}
        _known(loc, path, spec, ("family", "alpha", "baseline", "extend", "inner"))
        alpha = float(spec.get("alpha", 1.0))
        if not alpha > 0:
            _fail(loc, f"{path}.alpha", "exponent must be positive")
        base = _floats(loc, f"{path}.baseline", spec.get("baseline"), m)
        extend = bool(spec.get("extend", False))
        try:
            u = Exponentiated(alpha, base, inner, extend)
        except ValueError as exc:
            _fail(loc, f"{path}.baseline", str(exc))
        return u, {"family": fam, "alpha": alpha, "baseline": base.tolist(), "extend": extend, "inner": inner_echo}
    if fam == "negdistsq":
        _known(loc, path, spec, ("family", "center"))
        c = _floats(loc, f"{path}.center", spec.get("center"), m)
        return NegDistSq.on(domain, c), {"family": fam, "center": c.tolist()}
    _known(loc, path, spec, ("family", "basis", "weights", "coeffs", "consts"))
    basis = spec.get("basis", "coordinates")
    if basis == "coordinates":
        w = _weights(loc, f"{path}.weights", spec.get("weights"), m)
        return LogLinear.coordinates(w), {"family": fam, "basis": basis, "weights": w.tolist()}
    if basis == "budget-shares":
        if domain.budget is None:
            _fail(loc, f"{path}.basis", "budget-shares basis needs a simplex domain")
        w = _weights(loc, f"{path}.weights", spec.get("weights"), m + 1)
        return LogLinear.budget_shares(w, domain.budget), {"family": fam, "basis": basis, "weights": w.tolist()}
    if basis == "custom":
        consts = _floats(loc, f"{path}.consts", spec.get("consts"))
        coeffs = _floats(loc, f"{path}.coeffs", spec.get("coeffs"), consts.shape[0] * m).reshape(-1, m)
        w = _weights(loc, f"{path}.weights", spec.get("weights"), consts.shape[0])
        echo = {"family": fam, "basis": basis, "coeffs": coeffs.tolist(), "consts": consts.tolist(), "weights": w.tolist()}
        return LogLinear(coeffs, consts, w), echo
    _fail(loc, f"{path}.basis", f"unknown basis {basis!r}")


def _method(loc, spec, n, dim):
    if not isinstance(spec, dict) or "kind" not in spec:
        _fail(loc, "method.kind", "missing method kind")
    kind = spec["kind"]
    if kind == "egalitarian":
        method, echo = Egalitarian(), {}
    elif kind == "nash":
        method, echo = Nash(), {}
    elif kind == "idm":
        method, echo = IDM(), {}
    elif kind == "pareto-invariant":
        angles = int(spec.get("angles", 720))
        method, echo = ParetoInvariant(angles), {"angles": angles}
    elif kind == "dictatorial":
        k = int(spec.get("dictator", 0))
        method, echo = Dictatorial(k), {"dictator": k}
    elif kind == "dummy":
        t = _floats(loc, "method.target", spec.get("target"), dim)
        method, echo = Dummy(tuple(t.tolist())), {"target": t.tolist()}
    elif kind == "logbarrier-weighted":
        w = _weights(loc, "method.weights", spec.get("weights", [1.0 / n] * n), n)
        method, echo = LogBarrierWeighted(tuple(w.tolist())), {"weights": w.tolist()}
    elif kind == "lagrange":
        w = _weights(loc, "method.weights", spec.get("weights", [1.0 / n] * n), n)
        lam = _floats(loc, "method.lagrange", spec.get("lagrange", [0.0] * n), n)
        method, echo = WeightedLagrange(tuple(w.tolist()), tuple(lam.tolist())), {"weights": w.tolist(), "lagrange": lam.tolist()}
    else:
        _fail(loc, "method.kind", f"unknown method kind {kind!r}")
    try:
        check_arity(method, n)
    except (ValueError, IndexError) as exc:
        _fail(loc, "method.kind", f"arity error: {exc}")
    return method, {"kind": method_kind(method), **echo}


def _config(loc, table, spec, cls):
    spec = spec or {}
    allowed = cls.__dataclass_fields__
    _known(loc, table, spec, allowed)
    try:
        return cls(**spec)
    except (TypeError, ValueError) as exc:
        _fail(loc, table, str(exc))


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"invalid TOML: {exc}") from exc
    loc = _Locator(text)
    _known(loc, "", doc, ("name", "seed", "x0", "domain", "party", "method", "solver", "iteration", "pareto", "manipulation"))

    domain, domain_echo = _domain(loc, doc.get("domain"))
    parties = doc.get("party")
    if not isinstance(parties, list) or len(parties) < 2:
        _fail(loc, "party", "a scenario needs at least two [[party]] tables")
    profile, party_echo = [], []
    for i, spec in enumerate(parties):
        u, echo = _party(loc, f"party[{i}]", spec, domain)
        profile.append(u)
        party_echo.append(echo)
    method, method_echo = _method(loc, doc.get("method"), len(profile), domain.dim)

    if "x0" not in doc:
        _fail(loc, "x0", "missing status quo x0")
    x0 = _floats(loc, "x0", doc["x0"], domain.dim)
    if not contains(domain, x0):
        _fail(loc, "x0", "status quo lies outside the domain")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        _fail(loc, "seed", "seed must be a non-negative integer")

    solver = _config(loc, "solver", doc.get("solver"), SolverConfig)
    iteration = _config(loc, "iteration", doc.get("iteration"), IterationConfig)
    pareto = doc.get("pareto", {})
    _known(loc, "pareto", pareto, ("resolution",))
    resolution = int(pareto.get("resolution", 101))
    if resolution < 2:
        _fail(loc, "pareto.resolution", "resolution must be at least 2")

    manip = _manipulation(loc, doc.get("manipulation", {}), len(profile), domain.dim, profile)
    return Scenario(
        name=str(doc.get("name", name)),
        domain=domain,
        profile=tuple(profile),
        method=method,
        x0=x0,
        seed=seed,
        solver=solver,
        iteration=iteration,
        resolution=resolution,
        manipulation=manip,
        parties=party_echo,
        domain_spec=domain_echo,
        method_spec=method_echo,
    )


def _manipulation(loc, spec, n, dim, profile) -> ManipulationSpec:
    _known(loc, "manipulation", spec, ("party", "family", "grid", "baseline", "extend"))
    party = int(spec.get("party", 0))
    if not 0 <= party < n:
        _fail(loc, "manipulation.party", f"party must be in 0..{n - 1}")
    fam = spec.get("family", "scale")
    if fam not in FAMILY_KINDS:
        _fail(loc, "manipulation.family", f"family must be one of {', '.join(FAMILY_KINDS)}")
    grid = spec.get("grid")
    if fam in ("scale", "exponent"):
        g = _floats(loc, "manipulation.grid", grid if grid is not None else [0.1, 0.25, 0.5, 1.0, 2.0])
        if g.size == 0 or np.any(g <= 0):
            _fail(loc, "manipulation.grid", "grid values must be positive")
        grid = tuple(g.tolist())
    else:
        if not grid:
            _fail(loc, "manipulation.grid", "a non-empty grid of vectors is required")
        if fam == "weight-replace":
            if not isinstance(profile[party], LogLinear):
                _fail(loc, "manipulation.family", "weight replacement needs a log-linear party")
            size = profile[party].weights.shape[0]
            grid = tuple(tuple(_weights(loc, "manipulation.grid", w, size).tolist()) for w in grid)
        else:
            if not isinstance(profile[party], ConcaveQuadratic):
                _fail(loc, "manipulation.family", "peak shifting needs a quadratic party")
            grid = tuple(tuple(_floats(loc, "manipulation.grid", p, dim).tolist()) for p in grid)
    baseline = spec.get("baseline")
    if baseline is not None:
        baseline = tuple(_floats(loc, "manipulation.baseline", baseline, dim).tolist())
    return ManipulationSpec(party, fam, grid, baseline, bool(spec.get("extend", False)))


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file."""
    p = Path(path)
    if not p.exists():
        candidate = SCENARIO_DIR / f"{path}.toml"
        if candidate.exists():
            p = candidate
        else:
            raise ScenarioError(f"scenario file not found: {path}")
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {p}: {exc}") from exc
    return parse_scenario(text, name=p.stem)


def shipped_scenarios() -> list[str]:
    return sorted(f.stem for f in SCENARIO_DIR.glob("*.toml"))
