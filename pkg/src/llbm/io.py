"""Instance files, body literals and report serialization.

An instance file is JSON::

    {
      "version": 1,
      "bodies": {"K": {"type": "zonotope", "generators": [[1, 0], [0, 1]]},
                 "I": {"type": "segment", "generator": [1, 1]}},
      "functions": {"f": {"type": "support_diff", "plus": "K", "minus": "I"}},
      "experiments": [{"command": "deficit", "body": "K", "function": "f"}]
    }

Unknown fields are rejected at every level.  Report numbers are written
with 17 significant digits so that a binary64 value survives the trip.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import numbers
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InputError
from .geometry import Segment, SupportDifference, Zonotope
from .smooth.bodies import Ellipsoid, PerturbedBall, SmoothBody, SmoothFunction

__all__ = [
    "FORMAT_VERSION",
    "Instance",
    "parse_body",
    "parse_instance",
    "load_instance",
    "serialize_instance",
    "ReportRecord",
    "dumps",
    "to_csv",
    "EXPERIMENT_FIELDS",
]

FORMAT_VERSION = 1

BODY_FIELDS = {
    "zonotope": {"type", "generators", "dim"},
    "segment": {"type", "generator"},
    "ellipsoid": {"type", "matrix"},
    "perturbed_ball": {"type", "dim", "radius", "harmonics"},
}
FUNCTION_FIELDS = {
    "support_diff": {"type", "plus", "minus"},
    "support": {"type", "body"},
}
HARMONIC_FIELDS = {"l", "m", "coeff"}
EXPERIMENT_FIELDS = {
    "id", "command", "body", "bodies", "function", "segment", "segments", "candidates", "matrix",
    "n", "k", "a", "fvals", "steps", "seed", "trials", "dims", "gens", "tol", "threads", "exact",
}


def _reject_unknown(what: str, given: dict, allowed: set) -> None:
    extra = sorted(set(given) - allowed)
    if extra:
        raise InputError(f"{what}: unknown field(s) {', '.join(extra)}")


def _matrix(value, what: str) -> np.ndarray:
    try:
        A = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{what}: expected a numeric array") from None
    if not np.all(np.isfinite(A)):
        raise InputError(f"{what}: entries must be finite")
    return A


def parse_body(literal: Any, name: str = "<inline>"):
    """Body object from a literal dict (or a bare generator list for a zonotope)."""
    if isinstance(literal, list):
        literal = {"type": "zonotope", "generators": literal}
    if not isinstance(literal, dict) or "type" not in literal:
        raise InputError(f"body {name!r}: expected an object with a 'type'")
    kind = literal["type"]
    if kind not in BODY_FIELDS:
        raise InputError(f"body {name!r}: unknown type {kind!r}")
    _reject_unknown(f"body {name!r}", literal, BODY_FIELDS[kind])
    try:
        if kind == "zonotope":
            G = _matrix(literal.get("generators", []), f"body {name!r}")
            dim = literal.get("dim")
            if G.size == 0 and dim is None:
                raise InputError(f"body {name!r}: an empty zonotope needs 'dim'")
            return Zonotope(G.reshape(-1, dim) if G.size == 0 else G, dim=dim)
        if kind == "segment":
            return Segment(_matrix(literal["generator"], f"body {name!r}"))
        if kind == "ellipsoid":
            return Ellipsoid(_matrix(literal["matrix"], f"body {name!r}"))
        harmonics = literal.get("harmonics", [])
        for h in harmonics:
            if not isinstance(h, dict):
                raise InputError(f"body {name!r}: harmonic terms must be objects")
            _reject_unknown(f"body {name!r} harmonic", h, HARMONIC_FIELDS)
        return PerturbedBall(int(literal["dim"]), float(literal["radius"]), harmonics)
    except KeyError as exc:
        raise InputError(f"body {name!r}: missing field {exc.args[0]!r}") from None
    except InputError as exc:
        msg = str(exc)
        raise type(exc)(msg if msg.startswith(f"body {name!r}") else f"body {name!r}: {msg}") from None


@dataclass
class Instance:
    version: int = FORMAT_VERSION
    bodies: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    experiments: list = field(default_factory=list)

    def __post_init__(self):
        self._body_cache: dict = {}

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.version, self.bodies, self.functions, self.experiments) == (
            other.version, other.bodies, other.functions, other.experiments)

    def body(self, name: str):
        if name not in self.bodies:
            raise InputError(f"unresolved body name {name!r}")
        if name not in self._body_cache:
            self._body_cache[name] = parse_body(self.bodies[name], name)
        return self._body_cache[name]

    def function(self, name: str):
        if name not in self.functions:
            raise InputError(f"unresolved function name {name!r}")
        lit = self.functions[name]
        if lit["type"] == "support":
            parts = [(1.0, self.body(lit["body"]))]
        else:
            parts = [(1.0, self.body(lit["plus"])), (-1.0, self.body(lit["minus"]))]
        dims = {b.dim for _, b in parts}
        if len(dims) != 1:
            raise InputError(f"function {name!r}: bodies of different dimensions {sorted(dims)}")
        smooth = [isinstance(b, SmoothBody) for _, b in parts]
        if all(smooth):
            return SmoothFunction(parts)
        if any(smooth):
            raise InputError(f"function {name!r} mixes smooth bodies with zonotopes")
        plus = parts[0][1]
        minus = parts[1][1] if len(parts) > 1 else None
        return SupportDifference(plus, minus)


def parse_instance(data: Any) -> Instance:
    """Validate a decoded instance document; every name must resolve."""
    if not isinstance(data, dict):
        raise InputError("instance file must hold a JSON object")
    _reject_unknown("instance", data, {"version", "bodies", "functions", "experiments"})
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported instance version {version!r}")
    bodies = data.get("bodies", {})
    functions = data.get("functions", {})
    experiments = data.get("experiments", [])
    if not isinstance(bodies, dict) or not isinstance(functions, dict) or not isinstance(experiments, list):
        raise InputError("'bodies' and 'functions' must be objects, 'experiments' a list")
    inst = Instance(version, bodies, functions, experiments)
    for name in bodies:
        inst.body(name)
    for name, lit in functions.items():
        if not isinstance(lit, dict) or lit.get("type") not in FUNCTION_FIELDS:
            raise InputError(f"function {name!r}: type must be one of {sorted(FUNCTION_FIELDS)}")
        _reject_unknown(f"function {name!r}", lit, FUNCTION_FIELDS[lit["type"]])
        missing = FUNCTION_FIELDS[lit["type"]] - set(lit)
        if missing:
            raise InputError(f"function {name!r}: missing field(s) {', '.join(sorted(missing))}")
        inst.function(name)
    for i, exp in enumerate(experiments):
        if not isinstance(exp, dict) or "command" not in exp:
            raise InputError(f"experiment {i}: expected an object with a 'command'")
        _reject_unknown(f"experiment {exp.get('id', i)!r}", exp, EXPERIMENT_FIELDS)
    return inst


def load_instance(path) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file {path} is not valid JSON: {exc}") from None
    return parse_instance(data)


def serialize_instance(inst: Instance) -> dict:
    return {"version": inst.version, "bodies": inst.bodies, "functions": inst.functions,
            "experiments": inst.experiments}


# Reports.

@dataclass
class ReportRecord:
    experiment: str
    command: str
    inputs: dict
    outputs: dict
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    timing: float = 0.0
    rows: list | None = None  # per-trial rows for CSV output

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def as_dict(self, timing: bool = True) -> dict:
        d = {
            "experiment": self.experiment,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "verdicts": self.verdicts,
            "passed": self.passed,
        }
        if timing:
            d["timing_seconds"] = self.timing
        return d


def _plain(obj):
    """Convert numpy scalars/arrays and dataclass-like objects to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    text = format(x, ".17g")
    if all(c not in text for c in ".eE"):
        text += ".0"
    return text


def _emit(obj, indent: int, level: int, out: list) -> None:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + pad)
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(json.dumps(k) + ": ")
            _emit(v, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[" + pad)
        for i, v in enumerate(obj):
            if i:
                out.append(sep)
            _emit(v, indent, level + 1, out)
        out.append(end + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    else:
        out.append(json.dumps(obj))


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float at 17 significant digits."""
    out: list = []
    _emit(_plain(obj), indent, 0, out)
    return "".join(out)


def _flatten(prefix: str, obj, out: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, list):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else str(v)


def to_csv(records: list[ReportRecord]) -> str:
    """Per-trial rows when a record has them, else ``experiment,key,value`` lines."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    with_rows = [r for r in records if r.rows]
    if with_rows and len(with_rows) == len(records):
        header = list(with_rows[0].rows[0].keys())
        writer.writerow(["experiment"] + header)
        for r in records:
            for row in r.rows:
                writer.writerow([r.experiment] + [_cell(_plain(row[h])) for h in header])
        return buf.getvalue()
    writer.writerow(["experiment", "key", "value"])
    for r in records:
        flat: list = []
        _flatten("", _plain(r.as_dict(timing=False)), flat)
        for k, v in flat:
            writer.writerow([r.experiment, k, _cell(v)])
    return buf.getvalue()
