"""Scenario-driven command line front end.

Usage::

    l1fixed centre scenarios/two_point_centre.json
    l1fixed check scenarios/            # run every scenario in a directory
    l1fixed check scenarios/ --filter 'two_point*'

Exit codes: 0 ok, 1 a hard check failed, 2 input error, 3 precondition
failed, 4 resource exceeded.
"""
from __future__ import annotations

import argparse
import fnmatch
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import schema
from .chebyshev import DEFAULT_ITERS, Selection, chebyshev_centre, verify_centre
from .errors import InputError, L1FixedError, PreconditionError, ResourceError
from .fixedpoint import (Derivation, check_embedded_centre, invariant_point, linearity_residual,
                         solve_derivation, trivialize_cocycle)
from .groups import DEFAULT_CAP, coboundary, generate_closure, translation_cocycle, verify_cocycle
from .spaces import Kind, SpaceSpec, diameter

TASKS = ("radius", "centre", "fixed_point", "trivialize", "derivation", "embedded_centre", "check")
STATUS_CODES = {"ok": 0, "check_failed": 1, "input_error": 2, "precondition_failed": 3,
                "resource_exceeded": 4}
DEFAULT_OPTIONS = {"selection": "min_l2", "iters": DEFAULT_ITERS, "seed": 0, "tol": 1e-9,
                   "max_group": DEFAULT_CAP, "linearity_samples": 20}
REPORT_SUFFIX = ".report.json"


@dataclass
class Scenario:
    name: str
    task: str
    space: SpaceSpec
    payload: dict
    options: dict

    @classmethod
    def from_dict(cls, obj, default_name="scenario"):
        if not isinstance(obj, dict):
            raise InputError("scenario: top level must be a JSON object")
        task = str(obj.get("task", "")).replace("-", "_")
        if task not in TASKS:
            raise InputError(f"scenario field 'task': expected one of {', '.join(TASKS)}, got {task!r}")
        if "space" not in obj:
            raise InputError("scenario field 'space' is required")
        space = schema.parse_space(obj["space"])
        options = dict(DEFAULT_OPTIONS)
        options.update(obj.get("options", {}))
        payload = {k: v for k, v in obj.items() if k not in ("name", "task", "space", "options")}
        return cls(str(obj.get("name", default_name)), task, space, payload, options)

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(obj, default_name=path.name.removesuffix(".json"))

    def points(self, key="points"):
        if key not in self.payload:
            raise InputError(f"scenario field {key!r} is required for task {self.task!r}")
        pts = self.payload[key]
        if not isinstance(pts, list) or not pts:
            raise InputError(f"scenario field {key!r} must be a non-empty list of points")
        return np.stack([schema.parse_point(self.space, p) for p in pts])


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    hard: bool = True


@dataclass
class Report:
    scenario: str
    task: str
    status: str
    message: str = ""
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_ms: float = 0.0

    def to_dict(self, include_timing=True):
        d = asdict(self)
        if not include_timing:
            d.pop("wall_ms")
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["checks"] = [Check(**c) for c in d.get("checks", [])]
        return cls(**d)

    def to_json(self, include_timing=True):
        return schema.dumps(self.to_dict(include_timing))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @property
    def exit_code(self):
        return STATUS_CODES[self.status]


# task handlers: each returns (results, checks) -----------------------------------------

def _le(name, value, bound, tol):
    return Check(name, bool(value <= bound + tol), float(value - bound), float(tol))


def _expectations(sc, res_radius, centre, checks):
    exp = sc.payload.get("expect", {})
    space = sc.space
    if "radius" in exp:
        tol = float(exp.get("radius_tol", 1e-9))
        err = abs(res_radius - float(exp["radius"]))
        checks.append(Check("expect_radius", bool(err <= tol), err, tol))
    if centre is None:
        return
    if "centre_box" in exp:
        lo, hi = map(float, exp["centre_box"])
        tol = float(exp.get("centre_tol", 1e-9))
        viol = float(max(np.max(lo - centre), np.max(centre - hi), 0.0))
        checks.append(Check("expect_centre_box", bool(viol <= tol), viol, tol))
    if "centre_weighted_sum" in exp:
        tol = float(exp.get("centre_tol", 1e-9))
        err = abs(float(space.flat_weights @ centre) - float(exp["centre_weighted_sum"]))
        checks.append(Check("expect_centre_weighted_sum", bool(err <= tol), err, tol))
    if "point" in exp:
        tol = float(exp.get("point_tol", 1e-9))
        err = float(np.abs(centre - schema.parse_point(space, exp["point"])).max())
        checks.append(Check("expect_point", bool(err <= tol), err, tol))


def _members(sc, pts, checks, results):
    tol = float(sc.options["tol"])
    out = []
    for i, cand in enumerate(sc.payload.get("candidates", [])):
        c = schema.parse_point(sc.space, cand)
        r = float(cand["radius"])
        vc = verify_centre(sc.space, pts, c, r, tol)
        want = bool(cand.get("expect", True))
        out.append({"inside": vc.ok, "max_distance": vc.max_distance, "radius": r,
                    "violations": [list(v) for v in vc.violations]})
        checks.append(Check(f"candidate_{i}_{'inside' if want else 'outside'}",
                            vc.ok == want, vc.max_distance - r, tol))
    if out:
        results["candidates"] = out


def _task_radius(sc):
    pts = sc.points()
    res = chebyshev_centre(sc.space, pts, sc.options["selection"],
                           iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    diam = diameter(sc.space, pts)
    checks = [_le("radius_at_least_half_diameter", diam / 2, res.radius, 1e-9),
              _le("radius_at_most_diameter", res.radius, diam, 1e-9)]
    _expectations(sc, res.radius, None, checks)
    return {"radius": res.radius, "gap": res.gap, "method": res.method.value,
            "diameter": diam}, checks


def _task_centre(sc):
    pts = sc.points()
    res = chebyshev_centre(sc.space, pts, sc.options["selection"],
                           iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    tol = float(sc.options["tol"])
    vc = verify_centre(sc.space, pts, res.centre, res.radius + res.gap, tol)
    checks = [Check("centre_covers_points", vc.ok, vc.max_distance - res.radius - res.gap, tol)]
    _expectations(sc, res.radius, res.centre, checks)
    results = {"radius": res.radius, "centre": schema.format_point(sc.space, res.centre),
               "active": list(res.active), "gap": res.gap, "method": res.method.value}
    _members(sc, pts, checks, results)
    return results, checks


def _task_check(sc):
    pts = sc.points()
    checks, results = [], {}
    if not sc.payload.get("candidates"):
        raise InputError("scenario field 'candidates' is required for task 'check'")
    _members(sc, pts, checks, results)
    return results, checks


def _group(sc, key="group"):
    if key not in sc.payload:
        raise InputError(f"scenario field {key!r} is required for task {sc.task!r}")
    gens = schema.parse_generators(sc.space, sc.payload[key])
    return generate_closure(sc.space, gens, cap=int(sc.options["max_group"]))


def _task_fixed_point(sc):
    pts = sc.points()
    G = _group(sc)
    res = invariant_point(sc.space, pts, G, sc.options["selection"],
                          iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    checks = [_le("fixed_residual", res.residual, 0.0, 1e-9),
              _le("radius_within_circumradius", res.radius, res.centre_radius + res.gap, 1e-6)]
    _expectations(sc, res.radius, res.point, checks)
    return {"point": schema.format_point(sc.space, res.point), "radius": res.radius,
            "residual": res.residual, "circumradius": res.centre_radius, "gap": res.gap,
            "group_order": len(G)}, checks


def _task_trivialize(sc):
    G = _group(sc)
    spec = sc.payload.get("cocycle", {})
    if "coboundary_of" in spec:
        b = coboundary(G.linear_part(), schema.parse_point(sc.space, spec["coboundary_of"]))
    else:
        b = translation_cocycle(G)
    ok, worst = verify_cocycle(b, 1e-8)
    if not ok:
        raise PreconditionError(f"not a cocycle: worst identity residual {worst:.3g}")
    res = trivialize_cocycle(sc.space, b, sc.options["selection"],
                             iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    checks = [_le("cocycle_identity", worst, 0.0, 1e-8),
              _le("reconstruction", res.extra["reconstruction"], 0.0, 1e-8),
              _le("norm_bound", res.extra["norm"], res.extra["sup_b"], 1e-6)]
    _expectations(sc, res.radius, res.point, checks)
    return {"point": schema.format_point(sc.space, res.point), "radius": res.radius,
            "residual": res.residual, "reconstruction": res.extra["reconstruction"],
            "norm": res.extra["norm"], "sup_b": res.extra["sup_b"],
            "norm_bound_ok": bool(res.norm_bound_ok), "group_order": len(G)}, checks


def _task_derivation(sc):
    if sc.space.kind is not Kind.TRACE_CLASS:
        raise InputError("task 'derivation' needs a trace_class space")
    G = _group(sc)
    spec = sc.payload.get("derivation")
    if not isinstance(spec, dict):
        raise InputError("scenario field 'derivation' is required: {'inner': matrix} or "
                         "{'generator_values': [matrix, ...]}")
    d = sc.space.d
    if "inner" in spec:
        D = Derivation.inner(G, schema.parse_matrix(spec["inner"], d))
    elif "generator_values" in spec:
        gens = schema.parse_generators(sc.space, sc.payload["group"])
        idx = [int(np.argmin([np.abs(g.signature - e.signature).max() for e in G.elements]))
               for g in gens]
        vals = [schema.parse_matrix(m, d) for m in spec["generator_values"]]
        if len(vals) != len(idx):
            raise InputError("derivation: one generator value per generator is required")
        D = Derivation.from_generators(G, idx, vals)
    else:
        raise InputError("derivation: expected 'inner' or 'generator_values'")
    res = solve_derivation(D, iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    v = res.extra["matrix"]
    rng = np.random.default_rng(int(sc.options["seed"]))
    lin = 0.0
    for _ in range(int(sc.options["linearity_samples"])):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lin = max(lin, linearity_residual(D, v, a))
    checks = [_le("derivation_residual", res.extra["derivation_residual"], 0.0, 1e-7),
              _le("norm_bound", res.extra["norm_v"], res.extra["norm_D"], 1e-6),
              _le("linearity", lin, 0.0, 1e-6)]
    return {"point": schema.format_point(sc.space, res.point), "residual": res.residual,
            "derivation_residual": res.extra["derivation_residual"], "norm_v": res.extra["norm_v"],
            "norm_D": res.extra["norm_D"], "linearity": lin,
            "norm_bound_ok": bool(res.norm_bound_ok), "group_order": len(G)}, checks


def _task_embedded_centre(sc):
    if "v0_space" not in sc.payload:
        raise InputError("scenario field 'v0_space' is required for task 'embedded_centre'")
    v0 = schema.parse_space(sc.payload["v0_space"])
    pts = sc.points()
    rep = check_embedded_centre(sc.space, v0, pts, sc.options["selection"],
                                iters=int(sc.options["iters"]), seed=int(sc.options["seed"]))
    checks = [_le("v0_block_norm", rep.v0_norm, 0.0, 1e-6),
              _le("radius_agreement", rep.radius_gap, 0.0, 1e-9)]
    _expectations(sc, rep.radius_w, None, checks)
    W = SpaceSpec.direct_sum(sc.space, v0)
    return {"centre": schema.format_point(W, rep.centre), "v0_norm": rep.v0_norm,
            "radius_w": rep.radius_w, "radius_v": rep.radius_v}, checks


HANDLERS = {"radius": _task_radius, "centre": _task_centre, "check": _task_check,
            "fixed_point": _task_fixed_point, "trivialize": _task_trivialize,
            "derivation": _task_derivation, "embedded_centre": _task_embedded_centre}


def execute(sc: Scenario) -> Report:
    t0 = time.perf_counter()
    rep = Report(sc.name, sc.task, "ok")
    try:
        Selection(sc.options["selection"])
        results, checks = HANDLERS[sc.task](sc)
        rep.results = results
        rep.checks = checks
        if not all(c.passed for c in checks if c.hard):
            rep.status = "check_failed"
            rep.message = "failed: " + ", ".join(c.name for c in checks if c.hard and not c.passed)
    except ValueError as exc:
        rep.status = "precondition_failed" if isinstance(exc, PreconditionError) else "input_error"
        rep.message = str(exc)
    except (KeyError, TypeError) as exc:
        rep.status = "input_error"
        rep.message = f"malformed scenario: {exc!r}"
    except ResourceError as exc:
        rep.status = "resource_exceeded"
        rep.message = str(exc)
    rep.wall_ms = (time.perf_counter() - t0) * 1e3
    return rep


def run_scenario(path, overrides=None, task=None) -> Report:
    """Load and run one scenario file; errors become report statuses."""
    path = Path(path)
    try:
        sc = Scenario.load(path)
    except InputError as exc:
        return Report(path.name.removesuffix(".json"), task or "", "input_error", str(exc))
    if task is not None and sc.task != task:
        return Report(sc.name, sc.task, "input_error",
                      f"scenario task {sc.task!r} does not match subcommand task {task!r}")
    sc.options.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return execute(sc)


def run_suite(directory, pattern="*.json", overrides=None, write_reports=True):
    """Run every matching scenario in ``directory``, ordered by name.

    Returns ``(reports, exit_code)``; exit code 0 iff every report is ok.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"{directory}: not a directory")
    files = sorted(p for p in directory.iterdir()
                   if p.is_file() and p.name.endswith(".json") and not p.name.endswith(REPORT_SUFFIX)
                   and fnmatch.fnmatch(p.name, pattern))
    if not files:
        raise InputError(f"no scenario in {directory} matches {pattern!r}")
    reports = []
    for p in files:
        rep = run_scenario(p, overrides)
        if write_reports:
            p.with_name(p.name.removesuffix(".json") + REPORT_SUFFIX).write_text(rep.to_json(), encoding="utf-8")
        reports.append(rep)
    reports.sort(key=lambda r: r.scenario)
    code = max((r.exit_code for r in reports), default=0)
    return reports, code


def summary_table(reports) -> str:
    lines = [f"{'scenario':<32} {'task':<16} {'status':<20} {'checks':>7} {'ms':>9}",
             "-" * 88]
    for r in reports:
        passed = sum(c.passed for c in r.checks)
        lines.append(f"{r.scenario[:32]:<32} {r.task:<16} {r.status:<20} "
                     f"{passed:>3}/{len(r.checks):<3} {r.wall_ms:>9.1f}")
    return "\n".join(lines)


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-group", type=int, dest="max_group")
    common.add_argument("--iters", type=int)
    common.add_argument("--report", type=Path, help="write the JSON report(s) here")
    ap = argparse.ArgumentParser(prog="l1fixed", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("radius", "centre", "fixed-point", "trivialize", "derivation", "embedded-centre"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("scenario", type=Path)
    p = sub.add_parser("check", parents=[common], help="run a scenario directory (or one file)")
    p.add_argument("path", type=Path)
    p.add_argument("--filter", default="*.json")
    p.add_argument("--no-write", action="store_true", help="do not write reports next to inputs")
    p = sub.add_parser("acceptance", help="run the seeded acceptance suite")
    p.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    p.add_argument("--scenarios", type=Path, help="scenario directory for the determinism run")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "acceptance":
        from .acceptance import run_all

        results = run_all(args.only, args.scenarios)
        for r in results:
            print(r.line())
        return 0 if all(r.ok for r in results) else 1
    overrides = {"seed": args.seed, "tol": args.tol, "max_group": args.max_group, "iters": args.iters}
    if args.command == "check":
        if args.path.is_file():
            reports = [run_scenario(args.path, overrides)]
            code = reports[0].exit_code
        else:
            try:
                reports, code = run_suite(args.path, args.filter, overrides, not args.no_write)
            except L1FixedError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return exc.exit_code
        print(summary_table(reports))
        if args.report:
            args.report.write_text(schema.dumps([r.to_dict() for r in reports]), encoding="utf-8")
        return code
    rep = run_scenario(args.scenario, overrides, task=args.command.replace("-", "_"))
    if args.report:
        args.report.write_text(rep.to_json(), encoding="utf-8")
    sys.stdout.write(rep.to_json())
    if rep.status != "ok":
        print(f"{rep.status}: {rep.message}", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
