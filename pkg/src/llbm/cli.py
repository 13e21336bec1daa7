"""Command-line front end.

Each subcommand takes its inputs either from an instance file
(``--input``, with names such as ``--body K``), from inline JSON literals,
or, when nothing is given, from random instances drawn with ``--seed``.
``run`` executes the experiment list of an instance file.

Exit status: 0 when every verdict passes, 1 when a violation is found,
2 on an input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Callable

import numpy as np

from .deficit import cube_case, deficit, derivative_convergence, dim1_case, monotonicity_check, theorem3_chain
from .errors import InputError, LLBMError
from .geometry import LinearMap, Segment, SupportDifference, Zonotope, support_function
from .io import EXPERIMENT_FIELDS, Instance, ReportRecord, dumps, load_instance, parse_body, to_csv
from .mixed import (
    covariance_check,
    mixed_volume,
    oracle_mixed_volume,
    projection_identity_check,
    shoelace_area,
    zonotope_volume,
)
from .smooth import (
    Ellipsoid,
    SmoothBody,
    SmoothFunction,
    as_smooth_function,
    equality_scan,
    smooth_deficit,
    smooth_derivative_check,
    smooth_volume,
)
from .sweep import (
    default_threads,
    random_segment,
    random_support_difference,
    random_zonotope,
    resolve_gen_count,
    summand_instance,
    trial_rng,
    zonoid_sweep,
)

COMMANDS: dict[str, Callable] = {}
HELP: dict[str, str] = {}


def command(name: str, help: str):
    def deco(fn):
        COMMANDS[name] = fn
        HELP[name] = help
        return fn
    return deco


class Context:
    """Name resolution and shared options for one invocation."""

    def __init__(self, instance: Instance | None, params: dict):
        self.instance = instance
        self.params = params
        self.seed = int(params.get("seed") or 0)

    def get(self, key, default=None):
        value = self.params.get(key)
        return default if value is None else value

    def rng(self, *keys):
        return trial_rng(self.seed, *keys)

    def dims(self, default):
        return _int_list(self.get("dims", default), "dims")

    def gens(self, default):
        return _str_list(self.get("gens", default))

    def tol(self, default: float) -> float:
        return float(self.get("tol", default))

    def _literal(self, spec):
        if isinstance(spec, str) and spec.strip()[:1] in "[{":
            try:
                return json.loads(spec)
            except json.JSONDecodeError as exc:
                raise InputError(f"cannot parse literal {spec!r}: {exc}") from None
        return spec

    def body(self, spec, what="body"):
        spec = self._literal(spec)
        if isinstance(spec, str):
            if self.instance is None:
                raise InputError(f"{what} {spec!r} given by name but no --input file")
            return self.instance.body(spec)
        return parse_body(spec)

    def bodies(self, spec, what="bodies"):
        spec = self._literal(spec)
        if isinstance(spec, str):
            spec = [s for s in spec.split(",") if s]
        if not isinstance(spec, list):
            raise InputError(f"{what}: expected a list")
        return [self.body(s, what) for s in spec]

    def function(self, spec):
        spec = self._literal(spec)
        if isinstance(spec, str):
            if self.instance is None:
                raise InputError(f"function {spec!r} given by name but no --input file")
            return self.instance.function(spec)
        if isinstance(spec, dict):
            kind = spec.get("type")
            if kind == "support":
                return _support_of(self.body(spec["body"]))
            if kind == "support_diff":
                plus, minus = self.body(spec["plus"]), self.body(spec["minus"])
                if isinstance(plus, SmoothBody) or isinstance(minus, SmoothBody):
                    return as_smooth_function(plus) - minus
                return SupportDifference(plus, minus)
        raise InputError(f"cannot read function {spec!r}")

    def segment(self, spec, what="segment"):
        b = self.body(spec, what)
        if isinstance(b, Zonotope) and b.num_generators == 1:
            b = Segment(b.generators[0])
        if not isinstance(b, Segment):
            raise InputError(f"{what} must be a segment")
        return b


def _support_of(body):
    if isinstance(body, SmoothBody):
        return as_smooth_function(body)
    return support_function(body)


def _int_list(value, what):
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    try:
        return [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {value!r}") from None


def _str_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _float_list(value, what):
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {value!r}") from None


def _verdict(value: float, tolerance: float, ok: bool) -> dict:
    return {"value": value, "tolerance": tolerance, "pass": bool(ok)}


def _record(ctx: Context, name: str, outputs: dict, checks: dict, rows=None) -> ReportRecord:
    inputs = {k: v for k, v in ctx.params.items() if k not in ("id", "command") and v is not None}
    return ReportRecord(
        experiment=str(ctx.params.get("id") or name),
        command=name,
        inputs=inputs,
        outputs=outputs,
        seed=ctx.seed,
        tolerances={k: c["tolerance"] for k, c in checks.items()},
        verdicts={k: bool(c["pass"]) for k, c in checks.items()},
        rows=rows,
    )


def _random_body_and_function(ctx: Context):
    n = ctx.dims([3])[0]
    m = resolve_gen_count(ctx.gens(["n+2"])[0], n)
    rng = ctx.rng(n, m)
    return random_zonotope(rng, n, m), random_support_difference(rng, n)


# Commands.

@command("volume", "volume of a zonotope or smooth body")
def cmd_volume(ctx: Context) -> ReportRecord:
    body = ctx.body(ctx.get("body")) if ctx.get("body") is not None else _random_body_and_function(ctx)[0]
    if isinstance(body, SmoothBody):
        return _record(ctx, "volume", {"volume": smooth_volume(body), "method": "quadrature"}, {})
    if isinstance(body, Segment):
        body = body.as_zonotope()
    out = {"volume": zonotope_volume(body)}
    if ctx.get("exact"):
        exact = zonotope_volume(body, exact=True)
        out.update(exact=str(exact), exact_float=float(exact))
    return _record(ctx, "volume", out, {})


@command("mixed-volume", "mixed volume of n zonotopes")
def cmd_mixed_volume(ctx: Context) -> ReportRecord:
    bodies = ctx.bodies(ctx.get("bodies"))
    out = {"mixed_volume": mixed_volume(bodies)}
    if ctx.get("exact"):
        exact = mixed_volume(bodies, exact=True)
        out.update(exact=str(exact), exact_float=float(exact))
    return _record(ctx, "mixed-volume", out, {})


def _zonotope_inputs(ctx: Context):
    if ctx.get("body") is None and ctx.get("function") is None:
        return _random_body_and_function(ctx)
    if ctx.get("body") is None or ctx.get("function") is None:
        raise InputError("give both --body and --function, or neither for a random instance")
    K, f = ctx.body(ctx.get("body")), ctx.function(ctx.get("function"))
    if isinstance(K, SmoothBody) or isinstance(f, SmoothFunction):
        raise InputError("this command needs a zonotope and a support difference; "
                         "use smooth-deficit for smooth bodies")
    if K.dim != f.dim:
        raise InputError(f"body in R^{K.dim} with a function on S^{f.dim - 1}")
    return K, f


@command("deficit", "LLBM deficit of a zonotope and a support difference")
def cmd_deficit(ctx: Context) -> ReportRecord:
    K, f = _zonotope_inputs(ctx)
    rep = deficit(K, f)
    tol = ctx.tol(1e-9)
    checks = {"deficit_nonnegative": _verdict(rep.deficit, -tol * rep.scale, rep.deficit >= -tol * rep.scale)}
    return _record(ctx, "deficit", rep.as_dict(), checks)


def _summand_inputs(ctx: Context):
    if all(ctx.get(k) is None for k in ("body", "segment", "function")):
        n = ctx.dims([3])[0]
        _, I, K, f = summand_instance(ctx.rng(n), n)
        return K, I, f
    if any(ctx.get(k) is None for k in ("body", "segment", "function")):
        raise InputError("give --body, --segment and --function, or none for a random instance")
    K, f = _zonotope_inputs(ctx)
    return K, ctx.segment(ctx.get("segment")), f


@command("monotonicity", "normalised deficit along K_t = (K div I) + tI")
def cmd_monotonicity(ctx: Context) -> ReportRecord:
    K, I, f = _summand_inputs(ctx)
    steps = ctx.get("steps", 11)
    steps = int(steps[0] if isinstance(steps, list) else str(steps).split(",")[0])
    rep = monotonicity_check(K, I, f, steps=steps)
    return _record(ctx, "monotonicity", rep.as_dict(), rep.checks)


@command("chain", "peel segments off K0 + I_1 + ... + I_l")
def cmd_chain(ctx: Context) -> ReportRecord:
    if ctx.get("body") is None:
        n = ctx.dims([3])[0]
        rng = ctx.rng(n)
        K0 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
        segs = [random_segment(rng, n) for _ in range(int(rng.integers(1, 5)))]
        f = random_support_difference(rng, n)
    else:
        K0, f = _zonotope_inputs(ctx)
        spec = ctx.get("segments", [])
        segs = [ctx.segment(s, "segments") for s in
                (spec if isinstance(spec, list) else ctx._literal(spec) if str(spec).startswith("[")
                 else [s for s in str(spec).split(",") if s])]
    rep = theorem3_chain(K0, segs, f)
    return _record(ctx, "chain", rep.as_dict(), rep.checks)


@command("sweep", "seeded random sweep of the deficit sign")
def cmd_sweep(ctx: Context) -> ReportRecord:
    dims = ctx.dims([2, 3])
    gens = ctx.gens(["n", "n+2"])
    trials = int(ctx.get("trials", 100))
    threads = ctx.get("threads")
    tol = ctx.tol(1e-9)
    summary = zonoid_sweep(dims, gens, trials, ctx.seed, threads=None if threads is None else int(threads), tol=tol)
    rows = [{k: getattr(r, k) for k in r.CSV_FIELDS} for r in summary.rows]
    out = summary.as_dict()
    checks = {
        "no_violations": _verdict(summary.min_normalized, -tol, summary.passed),
    }
    return _record(ctx, "sweep", out, checks, rows=rows)


@command("cube-case", "cube quantities and the deficit of the cube")
def cmd_cube_case(ctx: Context) -> ReportRecord:
    n = int(ctx.get("n") or ctx.dims([3])[0])
    if ctx.get("function") is not None:
        fs = [ctx.function(ctx.get("function"))]
    else:
        fs = [random_support_difference(ctx.rng(n, t), n) for t in range(int(ctx.get("trials", 1)))]
    reports = [cube_case(n, f) for f in fs]
    checks = {}
    for key in reports[0].checks:
        worst = max(reports, key=lambda r: 0 if r.checks[key]["pass"] else 1)
        checks[key] = {"value": worst.checks[key]["value"], "tolerance": worst.checks[key]["tolerance"],
                       "pass": all(r.checks[key]["pass"] for r in reports)}
    out = {"n": n, "cases": [r.as_dict() for r in reports]}
    return _record(ctx, "cube-case", out, checks)


@command("dim1", "deficit of a 1-dimensional zonotope")
def cmd_dim1(ctx: Context) -> ReportRecord:
    if ctx.get("a") is None:
        rng = ctx.rng(1)
        a, vals = float(rng.uniform(0.1, 10)), [float(rng.uniform(-5, 5))]
    else:
        a = float(ctx.get("a"))
        vals = _float_list(ctx.get("fvals", [1.0]), "fvals")
    if len(vals) not in (1, 2):
        raise InputError("fvals takes f(1) or the pair f(1), f(-1)")
    if len(vals) == 2 and vals[0] != vals[1]:
        raise InputError(f"f(1)={vals[0]} and f(-1)={vals[1]} differ; test functions are even")
    value = dim1_case(a, vals[0])
    tol = ctx.tol(1e-14) * vals[0] ** 2 / a
    return _record(ctx, "dim1", {"a": a, "f1": vals[0], "deficit": value},
                   {"deficit_zero": _verdict(abs(value), tol, abs(value) <= tol)})


@command("derivative", "three-term derivative split against central differences")
def cmd_derivative(ctx: Context) -> ReportRecord:
    K, I, f = _summand_inputs(ctx)
    steps = _float_list(ctx.get("steps", [1e-2, 5e-3, 2.5e-3]), "steps")
    conv = derivative_convergence(K, I, f, steps=steps, rtol=ctx.tol(1e-6))
    checks = {
        "terminal_error": _verdict(conv.errors[-1], conv.terminal_tolerance,
                                   conv.errors[-1] <= conv.terminal_tolerance),
        "convergence_order": _verdict(conv.order, conv.min_order, conv.order >= conv.min_order),
    }
    return _record(ctx, "derivative", conv.as_dict(), checks)


def _smooth_inputs(ctx: Context, need_function=True):
    if ctx.get("body") is None:
        rng = ctx.rng(3)
        A = rng.uniform(-1, 1, (3, 3))
        K = Ellipsoid(A @ A.T + 0.5 * np.eye(3))
        B = rng.uniform(-1, 1, (3, 3))
        f = as_smooth_function(Ellipsoid(B @ B.T + 0.5 * np.eye(3))) - Ellipsoid.ball(3)
        return K, f
    K = ctx.body(ctx.get("body"))
    if not isinstance(K, SmoothBody):
        raise InputError("this command needs a smooth body (ellipsoid or perturbed_ball)")
    if ctx.get("function") is None:
        if need_function:
            raise InputError("missing --function")
        return K, None
    f = ctx.function(ctx.get("function"))
    if not isinstance(f, SmoothFunction):
        raise InputError("this command needs a function built from smooth bodies")
    if f.dim != K.dim:
        raise InputError(f"body in R^{K.dim} with a function on S^{f.dim - 1}")
    return K, f


@command("smooth-deficit", "deficit of a smooth body by quadrature")
def cmd_smooth_deficit(ctx: Context) -> ReportRecord:
    K, f = _smooth_inputs(ctx)
    tol = ctx.tol(1e-8)
    rep = smooth_deficit(K, f, tol=tol)
    bound = -max(tol, rep.error_estimate or 0.0)
    checks = {"deficit_nonnegative": _verdict(rep.deficit, bound, rep.deficit >= bound)}
    return _record(ctx, "smooth-deficit", rep.as_dict(), checks)


@command("derivative-smooth", "one-sided derivative check for a smooth body")
def cmd_derivative_smooth(ctx: Context) -> ReportRecord:
    K, f = _smooth_inputs(ctx)
    if ctx.get("segment") is not None:
        I = ctx.segment(ctx.get("segment"))
    else:
        I = random_segment(ctx.rng(3, 1), 3)
    steps = _float_list(ctx.get("steps", [1e-2, 5e-3, 2.5e-3, 1.25e-3]), "steps")
    rep = smooth_derivative_check(K, I, f, steps=steps, rtol=ctx.tol(1e-4))
    checks = {"matches_split": _verdict(rep.deviation, rep.tolerance, rep.passed)}
    return _record(ctx, "derivative-smooth", rep.as_dict(), checks)


@command("equality-scan", "equality cases of the smooth deficit")
def cmd_equality_scan(ctx: Context) -> ReportRecord:
    K, _ = _smooth_inputs(ctx, need_function=False)
    if ctx.get("candidates") is None:
        raise InputError("missing --candidates")
    cands = ctx.bodies(ctx.get("candidates"), "candidates")
    rep = equality_scan(K, cands)
    checks = {f"dilate_c={d['c']}": _verdict(d["deficit"], d["tolerance"], d["pass"]) for d in rep.dilates}
    for c in rep.candidates:
        checks[f"candidate_{c['index']}"] = _verdict(c["deficit"], c["tolerance"], c["pass"])
    return _record(ctx, "equality-scan", rep.as_dict(), checks)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@command("oracle-compare", "mixed volumes against the interpolation oracle")
def cmd_oracle_compare(ctx: Context) -> ReportRecord:
    tol = ctx.tol(1e-8)
    cases = []
    if ctx.get("bodies") is not None:
        Z1, Z2 = ctx.bodies(ctx.get("bodies"))
        ks = [int(ctx.get("k"))] if ctx.get("k") is not None else list(range(Z1.dim + 1))
        cases = [(Z1, Z2, k) for k in ks]
    else:
        for t in range(int(ctx.get("trials", 20))):
            dims = ctx.dims([2, 3, 4])
            n = dims[t % len(dims)]
            rng = ctx.rng(n, t)
            Z1 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
            Z2 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
            cases.append((Z1, Z2, int(rng.integers(0, n + 1))))
    worst, worst_shoelace = 0.0, 0.0
    rows = []
    for Z1, Z2, k in cases:
        n = Z1.dim
        v = mixed_volume([Z1] * (n - k) + [Z2] * k)
        o = oracle_mixed_volume(Z1, Z2, k)
        worst = max(worst, _relative(v, o))
        if n == 2:
            s = Zonotope(np.vstack([Z1.generators, Z2.generators]))
            worst_shoelace = max(worst_shoelace, _relative(zonotope_volume(s), shoelace_area(s)))
        rows.append({"dim": n, "k": k, "mixed_volume": v, "oracle": o})
    checks = {
        "oracle_agreement": _verdict(worst, tol, worst <= tol),
        "shoelace_agreement": _verdict(worst_shoelace, 1e-10, worst_shoelace <= 1e-10),
    }
    return _record(ctx, "oracle-compare", {"cases": rows, "max_relative": worst,
                                           "max_shoelace_relative": worst_shoelace}, checks)


@command("projection-check", "projection formula for a segment slot")
def cmd_projection_check(ctx: Context) -> ReportRecord:
    tol = ctx.tol(1e-10)
    if ctx.get("segment") is not None:
        cases = [(ctx.segment(ctx.get("segment")), ctx.bodies(ctx.get("bodies", [])))]
    else:
        cases = []
        dims = ctx.dims([2, 3, 4])
        for t in range(int(ctx.get("trials", 20))):
            n = dims[t % len(dims)]
            rng = ctx.rng(n, t)
            cases.append((random_segment(rng, n),
                          [random_zonotope(rng, n, int(rng.integers(1, n + 3)), full=False) for _ in range(n - 1)]))
    rows, worst = [], 0.0
    for I, bodies in cases:
        lhs, rhs = projection_identity_check(I, bodies)
        worst = max(worst, _relative(lhs, rhs) if max(abs(lhs), abs(rhs)) > 0 else 0.0)
        rows.append({"dim": I.dim, "lhs": lhs, "rhs": rhs})
    return _record(ctx, "projection-check", {"cases": rows, "max_relative": worst},
                   {"projection_identity": _verdict(worst, tol, worst <= tol)})


@command("covariance-check", "mixed volumes under a linear map")
def cmd_covariance_check(ctx: Context) -> ReportRecord:
    tol = ctx.tol(1e-10)
    if ctx.get("matrix") is not None:
        M = ctx._literal(ctx.get("matrix"))
        cases = [(LinearMap(M), ctx.bodies(ctx.get("bodies")))]
    else:
        cases = []
        dims = ctx.dims([2, 3, 4])
        for t in range(int(ctx.get("trials", 20))):
            n = dims[t % len(dims)]
            rng = ctx.rng(n, t)
            A = LinearMap(rng.uniform(-1, 1, (n, n)) + np.eye(n))
            cases.append((A, [random_zonotope(rng, n, int(rng.integers(1, n + 3)), full=False) for _ in range(n)]))
    rows, worst = [], 0.0
    for A, bodies in cases:
        lhs, rhs = covariance_check(A, bodies)
        worst = max(worst, _relative(lhs, rhs) if max(abs(lhs), abs(rhs)) > 0 else 0.0)
        rows.append({"dim": A.dim, "det": A.det, "lhs": lhs, "rhs": rhs})
    return _record(ctx, "covariance-check", {"cases": rows, "max_relative": worst},
                   {"covariance": _verdict(worst, tol, worst <= tol)})


# Argument parsing.

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance file (JSON)")
    common.add_argument("--output", help="write the machine-readable record here ('-' for stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int)
    common.add_argument("--dims", help="comma-separated dimensions")
    common.add_argument("--gens", help="comma-separated generator counts, integers or n+k")
    common.add_argument("--tol", type=float, help="override the command's default tolerance")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for sweeps (default: $LLBM_THREADS or 1)")
    common.add_argument("--exact", action="store_true", help="use rational arithmetic where available")
    common.add_argument("--body", help="body name or JSON literal")
    common.add_argument("--bodies", help="comma-separated names or a JSON list")
    common.add_argument("--function", help="function name or JSON literal")
    common.add_argument("--segment", help="segment name or JSON literal")
    common.add_argument("--segments", help="comma-separated names or a JSON list")
    common.add_argument("--candidates", help="comma-separated names or a JSON list")
    common.add_argument("--matrix", help="JSON matrix for covariance-check")
    common.add_argument("--n", type=int, help="dimension for cube-case")
    common.add_argument("--k", type=int, help="number of Z2 slots for oracle-compare")
    common.add_argument("--a", type=float, help="half-length for dim1")
    common.add_argument("--fvals", help="f(1) or f(1),f(-1) for dim1")
    common.add_argument("--steps", help="finite-difference steps, or the t-grid size for monotonicity")

    parser = argparse.ArgumentParser(prog="llbm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=HELP[name])
    sub.add_parser("run", parents=[common], help="execute the experiments listed in --input")
    return parser


def _params_from_args(args) -> dict:
    keys = EXPERIMENT_FIELDS - {"id", "command"}
    params = {k: getattr(args, k, None) for k in keys}
    if not params["exact"]:
        params["exact"] = None
    return params


def execute(argv=None) -> tuple[int, list[ReportRecord]]:
    parser = build_parser()
    args = parser.parse_args(argv)
    instance = load_instance(args.input) if args.input else None
    cli_params = _params_from_args(args)
    if args.threads is None:
        cli_params["threads"] = default_threads()
    if args.command == "run":
        if instance is None:
            raise InputError("run needs --input")
        jobs = []
        for i, exp in enumerate(instance.experiments):
            params = dict(cli_params)
            params.update({k: v for k, v in exp.items()})
            params.setdefault("id", f"exp{i}")
            if exp["command"] not in COMMANDS:
                raise InputError(f"experiment {params['id']!r}: unknown command {exp['command']!r}")
            jobs.append((exp["command"], params))
    else:
        jobs = [(args.command, dict(cli_params, id=args.command))]
    records = []
    for name, params in jobs:
        ctx = Context(instance, params)
        start = time.perf_counter()
        rec = COMMANDS[name](ctx)
        rec.timing = time.perf_counter() - start
        records.append(rec)
    text = (to_csv(records) if args.format == "csv"
            else dumps([r.as_dict() for r in records] if len(records) > 1 else records[0].as_dict()))
    if args.output == "-":
        sys.stdout.write(text.rstrip("\n") + "\n")
    else:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text.rstrip("\n") + "\n")
        for r in records:
            print(_summary_line(r))
    return (0 if all(r.passed for r in records) else 1), records


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _summary_line(r: ReportRecord) -> str:
    status = "PASS" if r.passed else "FAIL"
    keys = ("deficit", "volume", "mixed_volume", "min_normalized_deficit", "violations", "max_relative",
            "deviation", "order")
    bits = [f"{k}={_short(r.outputs[k])}" for k in keys if k in r.outputs and not isinstance(r.outputs[k], dict)]
    failed = [k for k, ok in r.verdicts.items() if not ok]
    if failed:
        bits.append("failed: " + ", ".join(failed))
    return f"[{status}] {r.experiment} ({r.command}) " + " ".join(bits) + f" [{r.timing:.3f}s]"


def main(argv=None) -> int:
    try:
        code, _ = execute(argv)
    except LLBMError as exc:
        print(f"llbm: error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
