"""Problem specification files.

A spec is a YAML mapping. Example::

    alphabet: {x: 2, y: 2, xhat: 2}
    px: [0.5, 0.5]
    e: [[0, 1], [1, 0]]
    d: [[0, 1], [1, 0]]
    E: 0.25
    D_grid: [0.0, 0.05, 0.1]
    solver: {tolerance: 1.0e-6, max_iterations: 200, multistart_count: 16, rng_seed: 0}
    channels:                      # optional, named side channels for R_WZ columns
      bsc: [[0.75, 0.25], [0.25, 0.75]]
    simulation:                    # optional, read by the ``sim`` command
      n: 10
      delta: 0.1
      D: 0.2
      trials: 2000
      adversaries:
        - {name: bsc, kind: iid, channels: [bsc]}
        - {name: mix, kind: compound, channels: [w1, w2], weight: 0.5}

Adversary channels are either names from ``channels`` or literal matrices.
``binary_example: 0.25`` alone expands to the doubly symmetric binary example.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import yaml

from .geometry import DistortionMeasure
from .sim.experiment import KINDS

TOP_KEYS = ("alphabet", "px", "e", "d", "E", "D_grid", "solver", "channels", "simulation", "binary_example")
SOLVER_KEYS = ("tolerance", "max_iterations", "multistart_count", "rng_seed")
SIM_KEYS = ("n", "delta", "D", "trials", "adversaries")
ADVERSARY_KEYS = ("name", "kind", "channels", "weight", "permute")


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-6`` (no dot) as a float, as YAML 1.2 does."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


class SpecError(ValueError):
    """Malformed spec; ``line`` is 1-based when known."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = f" (line {line})" if line else ""
        field_ = f"{path}: " if path else ""
        super().__init__(f"{field_}{message}{where}")


@dataclass
class SimulationSpec:
    n: int
    delta: float
    D: float
    trials: int
    adversaries: list

    def to_dict(self) -> dict:
        return {"n": self.n, "delta": self.delta, "D": self.D, "trials": self.trials, "adversaries": [dict(a) for a in self.adversaries]}


@dataclass
class ProblemSpec:
    nx: int
    ny: int
    nxhat: int
    px: list
    e: list
    d: list
    E: float
    D_grid: list
    solver: dict = field(default_factory=dict)
    channels: dict = field(default_factory=dict)
    simulation: SimulationSpec | None = None
    binary_example: float | None = None

    def to_dict(self) -> dict:
        out = {
            "alphabet": {"x": self.nx, "y": self.ny, "xhat": self.nxhat},
            "px": list(self.px),
            "e": [list(r) for r in self.e],
            "d": [list(r) for r in self.d],
            "E": self.E,
            "D_grid": list(self.D_grid),
            "solver": dict(self.solver),
            "channels": {k: [list(r) for r in v] for k, v in self.channels.items()},
        }
        if self.simulation is not None:
            out["simulation"] = self.simulation.to_dict()
        if self.binary_example is not None:
            out["binary_example"] = self.binary_example
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def channel(self, ref) -> np.ndarray:
        if isinstance(ref, str):
            return np.array(self.channels[ref], dtype=float)
        return np.array(ref, dtype=float)

    def problem(self):
        from .solvers.bounds import RDProblem

        return RDProblem(np.array(self.px), np.array(self.e, dtype=float), np.array(self.d, dtype=float), self.E)

    def settings(self, tolerance: float | None = None, seed: int | None = None):
        from .solvers.bounds import SolverSettings

        kw = dict(self.solver)
        if tolerance is not None:
            kw["tolerance"] = tolerance
        if seed is not None:
            kw["rng_seed"] = seed
        return SolverSettings(**kw)


def binary_example(E: float, D_grid=None) -> ProblemSpec:
    """Uniform binary source, Hamming e and d, BSC(E) and the two extreme asymmetric channels."""
    from .binary import bsc, fig4_channels

    E = float(E)
    if not 0.0 < E <= 0.5:
        raise SpecError("binary example needs E in (0, 1/2]", "binary_example")
    if D_grid is None:
        D_grid = [round(float(x), 10) for x in np.arange(0.0, E + 1e-9, 0.05)]
    w1, w2 = fig4_channels(E)
    ham = [[0.0, 1.0], [1.0, 0.0]]
    sim = SimulationSpec(
        n=10,
        delta=0.1,
        D=round(0.8 * E, 10),
        trials=2000,
        adversaries=[
            {"name": "bsc", "kind": "iid", "channels": ["bsc"]},
            {"name": "w1", "kind": "iid", "channels": ["w1"]},
            {"name": "w2", "kind": "iid", "channels": ["w2"]},
            {"name": "compound", "kind": "compound", "channels": ["w1", "w2"], "weight": 0.5},
        ],
    )
    return ProblemSpec(
        nx=2,
        ny=2,
        nxhat=2,
        px=[0.5, 0.5],
        e=ham,
        d=ham,
        E=E,
        D_grid=list(D_grid),
        channels={"bsc": bsc(E).tolist(), "w1": w1.tolist(), "w2": w2.tolist()},
        simulation=sim,
        binary_example=E,
    )


def _line_map(text: str) -> dict:
    """Map dotted key paths to 1-based source lines."""
    out: dict = {}

    def walk(node, path):
        out.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                p = f"{path}.{k.value}" if path else str(k.value)
                out[p] = k.start_mark.line + 1
                walk(v, p)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, f"{path}[{i}]")

    root = yaml.compose(text, Loader=_Loader)
    if root is not None:
        walk(root, "")
    return out


class _Checker:
    def __init__(self, lines: dict):
        self.lines = lines

    def fail(self, path: str, msg: str):
        line = self.lines.get(path)
        if line is None:
            # fall back to the closest enclosing key
            p = path
            while p and line is None:
                p = p.rsplit(".", 1)[0] if "." in p else p.split("[")[0] if "[" in p else ""
                line = self.lines.get(p)
        raise SpecError(msg, path, line)

    def number(self, value, path, lo=None, hi=None, integer=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        if integer and int(value) != value:
            self.fail(path, f"expected an integer, got {value!r}")
        if not np.isfinite(value):
            self.fail(path, "must be finite")
        if lo is not None and value < lo:
            self.fail(path, f"must be >= {lo}, got {value}")
        if hi is not None and value > hi:
            self.fail(path, f"must be <= {hi}, got {value}")
        return int(value) if integer else float(value)

    def vector(self, value, path, size):
        if not isinstance(value, list) or len(value) != size:
            self.fail(path, f"expected a list of {size} numbers")
        return [self.number(v, f"{path}[{i}]", lo=0.0) for i, v in enumerate(value)]

    def matrix(self, value, path, rows, cols):
        if not isinstance(value, list) or len(value) != rows:
            self.fail(path, f"expected {rows} rows")
        for i, r in enumerate(value):
            if not isinstance(r, list) or len(r) != cols:
                self.fail(f"{path}[{i}]", f"expected {cols} entries")
        return [[self.number(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(value)]

    def keys(self, value, path, allowed):
        if not isinstance(value, dict):
            self.fail(path, "expected a mapping")
        for k in value:
            if k not in allowed:
                self.fail(f"{path}.{k}" if path else str(k), f"unknown field {k!r}")


def parse_spec(text: str) -> ProblemSpec:
    """Parse and validate spec text; raises ``SpecError`` with the offending field and line."""
    try:
        raw = yaml.load(text, Loader=_Loader)
        lines = _line_map(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SpecError(f"invalid YAML: {getattr(exc, 'problem', exc)}", "", mark.line + 1 if mark else None) from None
    ck = _Checker(lines)
    if raw is None:
        raise SpecError("empty spec")
    ck.keys(raw, "", TOP_KEYS)
    if raw.get("binary_example") is not None and "px" not in raw:
        E = ck.number(raw["binary_example"], "binary_example", lo=0.0, hi=0.5)
        grid = raw.get("D_grid")
        spec = binary_example(E, None if grid is None else _grid(ck, grid))
        if "solver" in raw:
            spec.solver = _solver(ck, raw["solver"])
        if "simulation" in raw:
            spec.simulation = _simulation(ck, raw["simulation"], spec)
        return spec
    for k in ("alphabet", "px", "e", "d", "E", "D_grid"):
        if k not in raw:
            raise SpecError("missing required field", k)
    ck.keys(raw["alphabet"], "alphabet", ("x", "y", "xhat"))
    for k in ("x", "y", "xhat"):
        if k not in raw["alphabet"]:
            ck.fail("alphabet", f"missing size {k!r}")
    nx, ny, nxh = (ck.number(raw["alphabet"][k], f"alphabet.{k}", lo=1, integer=True) for k in ("x", "y", "xhat"))
    px = ck.vector(raw["px"], "px", nx)
    if abs(sum(px) - 1.0) > 1e-9:
        ck.fail("px", f"entries sum to {sum(px):.12g}, not 1")
    e = ck.matrix(raw["e"], "e", nx, ny)
    d = ck.matrix(raw["d"], "d", nx, nxh)
    for name, m in (("e", e), ("d", d)):
        try:
            DistortionMeasure(np.array(m))
        except ValueError as exc:
            ck.fail(name, str(exc))
    E = ck.number(raw["E"], "E", lo=0.0)
    spec = ProblemSpec(nx, ny, nxh, px, e, d, E, _grid(ck, raw["D_grid"]))
    if "solver" in raw:
        spec.solver = _solver(ck, raw["solver"])
    for name, m in (raw.get("channels") or {}).items():
        path = f"channels.{name}"
        w = ck.matrix(m, path, nx, ny)
        _stochastic(ck, w, path)
        spec.channels[str(name)] = w
    if raw.get("binary_example") is not None:
        spec.binary_example = ck.number(raw["binary_example"], "binary_example", lo=0.0, hi=0.5)
    if "simulation" in raw:
        spec.simulation = _simulation(ck, raw["simulation"], spec)
    return spec


def _grid(ck: _Checker, value):
    if not isinstance(value, list):
        ck.fail("D_grid", "expected a list")
    return [ck.number(v, f"D_grid[{i}]", lo=0.0) for i, v in enumerate(value)]


def _solver(ck: _Checker, value):
    ck.keys(value, "solver", SOLVER_KEYS)
    out = {}
    for k, v in value.items():
        integer = k != "tolerance"
        out[k] = ck.number(v, f"solver.{k}", lo=0 if integer else 1e-15, integer=integer)
    return out


def _stochastic(ck: _Checker, w, path):
    for i, r in enumerate(w):
        if min(r) < 0 or abs(sum(r) - 1.0) > 1e-9:
            ck.fail(f"{path}[{i}]", "channel rows must be probability vectors")


def _simulation(ck: _Checker, value, spec: ProblemSpec) -> SimulationSpec:
    ck.keys(value, "simulation", SIM_KEYS)
    for k in SIM_KEYS:
        if k not in value:
            ck.fail("simulation", f"missing field {k!r}")
    n = ck.number(value["n"], "simulation.n", lo=1, integer=True)
    delta = ck.number(value["delta"], "simulation.delta", lo=1e-12)
    D = ck.number(value["D"], "simulation.D", lo=0.0)
    trials = ck.number(value["trials"], "simulation.trials", lo=1, integer=True)
    advs = value["adversaries"]
    if not isinstance(advs, list) or not advs:
        ck.fail("simulation.adversaries", "expected a nonempty list")
    out = []
    for i, a in enumerate(advs):
        path = f"simulation.adversaries[{i}]"
        ck.keys(a, path, ADVERSARY_KEYS)
        if a.get("kind", "iid") not in KINDS:
            ck.fail(f"{path}.kind", f"kind must be one of {KINDS}")
        chans = a.get("channels")
        if not isinstance(chans, list) or not chans:
            ck.fail(f"{path}.channels", "expected a list of channel names or matrices")
        for j, c in enumerate(chans):
            cp = f"{path}.channels[{j}]"
            if isinstance(c, str):
                if c not in spec.channels:
                    ck.fail(cp, f"unknown channel {c!r}")
            else:
                _stochastic(ck, ck.matrix(c, cp, spec.nx, spec.ny), cp)
        entry = {"name": str(a.get("name", f"adversary{i}")), "kind": a.get("kind", "iid"), "channels": list(chans)}
        if "weight" in a:
            entry["weight"] = ck.number(a["weight"], f"{path}.weight", lo=0.0, hi=1.0)
        if "permute" in a:
            if not isinstance(a["permute"], bool):
                ck.fail(f"{path}.permute", "expected true or false")
            entry["permute"] = a["permute"]
        out.append(entry)
    sim = SimulationSpec(n, delta, D, trials, out)
    for i, adv in enumerate(build_adversaries(spec, sim)):
        try:
            adv.validate(np.array(spec.px), np.array(spec.e), spec.E)
        except ValueError as exc:
            ck.fail(f"simulation.adversaries[{i}]", str(exc))
    return sim


def build_adversaries(spec: ProblemSpec, sim: SimulationSpec | None = None) -> list:
    from .sim.experiment import Adversary

    sim = sim or spec.simulation
    out = []
    for a in sim.adversaries:
        chans = tuple(spec.channel(c) for c in a["channels"])
        out.append(Adversary(a["name"], a["kind"], chans, a.get("weight", 1.0 if a["kind"] == "iid" else 0.5), a.get("permute", False)))
    return out


def load_spec(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
