"""Scenario files: a network plus simulation and inference defaults, as JSON.

All individual labels in the file are 1-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import OpinetError
from .network import BiasSpec, NetworkSpec, Source

SCHEMA = "opinet.scenario/1"

BIAS_FIELDS = {
    "none": ("w",),
    "linear": ("beta", "gamma"),
    "sin": ("a", "b"),
    "log": ("a", "c"),
    "poly": ("coeffs",),
}


class ScenarioError(OpinetError, ValueError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Tolerances:
    rank: float | None = None
    zero: float = 1e-7
    agree: float = 1e-7


@dataclass(frozen=True)
class SimulationDefaults:
    horizon: int | None = None
    seed: int = 0
    precision: str = "double"


@dataclass(frozen=True)
class InferenceDefaults:
    problem: int = 1
    m: int = 0
    p: int | None = None
    m_max: int = 2
    p_sweep: tuple[int, ...] = ()
    tolerances: Tolerances = field(default_factory=Tolerances)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    spec: NetworkSpec
    description: str = ""
    x0: np.ndarray | None = None
    simulation: SimulationDefaults = field(default_factory=SimulationDefaults)
    inference: InferenceDefaults = field(default_factory=InferenceDefaults)

    def __post_init__(self):
        if self.x0 is not None:
            x0 = np.array(self.x0, dtype=float)
            x0.setflags(write=False)
            object.__setattr__(self, "x0", x0)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        same_x0 = (self.x0 is None and other.x0 is None) or (
            self.x0 is not None and other.x0 is not None and np.array_equal(self.x0, other.x0)
        )
        return (
            self.name == other.name
            and self.description == other.description
            and self.spec == other.spec
            and same_x0
            and self.simulation == other.simulation
            and self.inference == other.inference
        )

    __hash__ = None


# ------------------------------------------------------------------ parsing


def _obj(v, where, keys, required=()):
    if not isinstance(v, dict):
        raise ScenarioError(where, "expected an object")
    unknown = sorted(set(v) - set(keys))
    if unknown:
        raise ScenarioError(where, f"unknown field(s) {unknown}")
    missing = [k for k in required if k not in v]
    if missing:
        raise ScenarioError(where, f"missing field(s) {missing}")
    return v


def _num(v, where) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(where, f"expected a finite number, got {v!r}")
    return float(v)


def _int(v, where, lo=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(where, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ScenarioError(where, f"must be >= {lo}")
    return v


def _label(v, where, n) -> int:
    i = _int(v, where, 1)
    if i > n:
        raise ScenarioError(where, f"label {i} exceeds n = {n}")
    return i - 1


def _bias(v, where) -> BiasSpec:
    if not isinstance(v, dict) or "type" not in v:
        raise ScenarioError(where, "expected an object with a 'type'")
    kind = v["type"]
    if kind not in BIAS_FIELDS:
        raise ScenarioError(where + ".type", f"unknown bias type {kind!r}")
    names = BIAS_FIELDS[kind]
    _obj(v, where, ("type",) + names, ("type",) + names)
    if kind == "poly":
        cs = v["coeffs"]
        if not isinstance(cs, list):
            raise ScenarioError(where + ".coeffs", "expected a list")
        params = tuple(_num(c, f"{where}.coeffs[{k}]") for k, c in enumerate(cs))
    else:
        params = tuple(_num(v[k], f"{where}.{k}") for k in names)
    try:
        return BiasSpec(kind, params)
    except ValueError as exc:
        raise ScenarioError(where, str(exc)) from None


def scenario_from_dict(doc) -> Scenario:
    top = ("schema", "name", "description", "n", "weights", "sources", "bias", "x0", "simulation", "inference")
    _obj(doc, "$", top, ("schema", "name", "n", "weights"))
    if doc["schema"] != SCHEMA:
        raise ScenarioError("schema", f"expected {SCHEMA!r}, got {doc['schema']!r}")
    name = doc["name"]
    if not isinstance(name, str):
        raise ScenarioError("name", "expected a string")
    desc = doc.get("description", "")
    if not isinstance(desc, str):
        raise ScenarioError("description", "expected a string")
    n = _int(doc["n"], "n", 1)

    rows = doc["weights"]
    if not isinstance(rows, list) or len(rows) != n:
        raise ScenarioError("weights", f"expected {n} rows")
    W = np.zeros((n, n))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ScenarioError(f"weights[{i}]", f"expected {n} entries")
        for j, v in enumerate(row):
            W[i, j] = _num(v, f"weights[{i}][{j}]")

    sources = []
    src_doc = doc.get("sources", [])
    if not isinstance(src_doc, list):
        raise ScenarioError("sources", "expected a list")
    for d, s in enumerate(src_doc):
        where = f"sources[{d}]"
        _obj(s, where, ("u", "followers"), ("u", "followers"))
        if not isinstance(s["followers"], list):
            raise ScenarioError(where + ".followers", "expected a list")
        fl = tuple(_label(v, f"{where}.followers[{k}]", n) for k, v in enumerate(s["followers"]))
        sources.append(Source(_num(s["u"], where + ".u"), fl))

    bias = {}
    bias_doc = doc.get("bias", {})
    if not isinstance(bias_doc, dict):
        raise ScenarioError("bias", "expected an object keyed by label")
    for key, v in bias_doc.items():
        try:
            label = int(key)
        except ValueError:
            raise ScenarioError(f"bias.{key}", "key must be an integer label") from None
        if str(label) != key:
            raise ScenarioError(f"bias.{key}", "key must be a plain integer label")
        bias[_label(label, f"bias.{key}", n)] = _bias(v, f"bias.{key}")

    x0 = doc.get("x0")
    if x0 is not None:
        if not isinstance(x0, list) or len(x0) != n:
            raise ScenarioError("x0", f"expected {n} numbers or null")
        x0 = np.array([_num(v, f"x0[{i}]") for i, v in enumerate(x0)])

    sim = _obj(doc.get("simulation", {}), "simulation", ("horizon", "seed", "precision"))
    horizon = sim.get("horizon")
    if horizon is not None:
        horizon = _int(horizon, "simulation.horizon", 1)
    precision = sim.get("precision", "double")
    if precision not in ("double", "dd"):
        raise ScenarioError("simulation.precision", "expected 'double' or 'dd'")
    simulation = SimulationDefaults(horizon, _int(sim.get("seed", 0), "simulation.seed", 0), precision)

    inf = _obj(doc.get("inference", {}), "inference", ("problem", "m", "p", "m_max", "p_sweep", "tolerances"))
    problem = _int(inf.get("problem", 1), "inference.problem")
    if problem not in (1, 2, 3):
        raise ScenarioError("inference.problem", "expected 1, 2 or 3")
    p = inf.get("p")
    if p is not None:
        p = _int(p, "inference.p", 0)
    sweep = inf.get("p_sweep", [])
    if not isinstance(sweep, list):
        raise ScenarioError("inference.p_sweep", "expected a list")
    tol = _obj(inf.get("tolerances", {}), "inference.tolerances", ("rank", "zero", "agree"))
    rank = tol.get("rank")
    tolerances = Tolerances(
        None if rank is None else _num(rank, "inference.tolerances.rank"),
        _num(tol.get("zero", 1e-7), "inference.tolerances.zero"),
        _num(tol.get("agree", 1e-7), "inference.tolerances.agree"),
    )
    inference = InferenceDefaults(
        problem,
        _int(inf.get("m", 0), "inference.m", 0),
        p,
        _int(inf.get("m_max", 2), "inference.m_max", 1),
        tuple(_int(v, f"inference.p_sweep[{k}]", 0) for k, v in enumerate(sweep)),
        tolerances,
    )
    spec = NetworkSpec(W, tuple(sources), bias)
    return Scenario(name, spec, desc, x0, simulation, inference)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def bundled_scenario(name: str) -> Scenario:
    res = resources.files("opinet") / "scenarios" / f"{name}.json"
    if not res.is_file():
        raise ScenarioError(name, "no bundled scenario with this name")
    return parse_scenario(res.read_text())


def bundled_names() -> list[str]:
    root = resources.files("opinet") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


# ------------------------------------------------------------ serialization


def _bias_doc(b: BiasSpec) -> dict:
    if b.kind == "poly":
        return {"type": "poly", "coeffs": list(b.params)}
    return {"type": b.kind, **dict(zip(BIAS_FIELDS[b.kind], b.params))}


def scenario_to_dict(sc: Scenario) -> dict:
    spec = sc.spec
    tol = sc.inference.tolerances
    return {
        "schema": SCHEMA,
        "name": sc.name,
        "description": sc.description,
        "n": spec.n,
        "weights": spec.weights.tolist(),
        "sources": [{"u": s.u, "followers": [i + 1 for i in s.followers]} for s in spec.sources],
        "bias": {str(i + 1): _bias_doc(b) for i, b in spec.bias.items()},
        "x0": None if sc.x0 is None else sc.x0.tolist(),
        "simulation": {
            "horizon": sc.simulation.horizon,
            "seed": sc.simulation.seed,
            "precision": sc.simulation.precision,
        },
        "inference": {
            "problem": sc.inference.problem,
            "m": sc.inference.m,
            "p": sc.inference.p,
            "m_max": sc.inference.m_max,
            "p_sweep": list(sc.inference.p_sweep),
            "tolerances": {"rank": tol.rank, "zero": tol.zero, "agree": tol.agree},
        },
    }


def dumps_compact(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with objects indented and flat lists of scalars kept on one line."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps_compact(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [pad + dumps_compact(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(obj, allow_nan=False)


def serialize_scenario(sc: Scenario) -> str:
    return dumps_compact(scenario_to_dict(sc)) + "\n"


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(serialize_scenario(sc))
