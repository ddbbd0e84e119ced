"""Command-line front end.

    sbhzero validate --config scenario.json
    sbhzero verdict  --config scenario.json --mode radial|green
    sbhzero emit     --config scenario.json --what testfn|green|trace --out data.csv
    sbhzero ibp      --config scenario.json

Exit codes: 0 success / forced-zero, 1 malformed input, 2 axiom failure,
3 inconclusive, 4 unknown classification, 5 IBP residual above tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import radial_core as rc
from .config import ConfigError, ScenarioConfig, parse_overrides
from .errors import ConstructionError, PreconditionError, SbhError
from .green_domains import ModelDomain, level_radius
from .profiles import RadialProfile
from .testfns import (ClosedBall, build_radial_testfn, extend_by_zero, green_superposition,
                      growth_envelope_green, radial_envelope, validate_testfn)
from .uniqueness import (FORCED_ZERO, green_verdict, ibp_check_green, ibp_check_radial, radial_verdict)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_AXIOM = 2
EXIT_INCONCLUSIVE = 3
EXIT_UNKNOWN = 4
EXIT_IBP = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with axiom failures
    def error(self, message):
        raise UsageError(message)


class InputError(Exception):
    """Configuration incomplete for the requested command."""


def _add_common(p: argparse.ArgumentParser, suppress: bool):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--config", metavar="PATH", help="scenario JSON file", **kw)
    p.add_argument("--tolerance-overrides", metavar="KEY=VAL", action="append",
                   help="override a tolerance (repeatable, or comma separated)",
                   **({"default": argparse.SUPPRESS} if suppress else {"default": []}))
    p.add_argument("--json-out", metavar="PATH", help="also write the JSON report here", **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbhzero", description="Test functions and uniqueness criteria for zero sets.")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check test-function axioms and the growth envelope")
    _add_common(p, suppress=True)

    p = sub.add_parser("verdict", help="evaluate the uniqueness criterion")
    _add_common(p, suppress=True)
    p.add_argument("--mode", choices=("radial", "green"), required=True)

    p = sub.add_parser("emit", help="write CSV data")
    _add_common(p, suppress=True)
    p.add_argument("--what", choices=("testfn", "green", "trace"), required=True)
    p.add_argument("--out", metavar="PATH", required=True)
    p.add_argument("--mode", choices=("radial", "green"), default=None,
                   help="criterion for --what trace (default: from the testfn block)")

    p = sub.add_parser("ibp", help="integration-by-parts cross checks")
    _add_common(p, suppress=True)
    p.add_argument("--mode", choices=("radial", "green"), default=None)
    return parser


# --------------------------------------------------------------------------
# JSON helpers
# --------------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False)


# --------------------------------------------------------------------------
# builders shared by the commands
# --------------------------------------------------------------------------


def _require(cfg: ScenarioConfig, *blocks):
    for b in blocks:
        if getattr(cfg, b) is None:
            raise InputError(f"{b}: block required for this command")


def _mode_of(cfg: ScenarioConfig, mode):
    if mode is not None:
        return mode
    if cfg.testfn is not None and cfg.testfn.get("kind") in ("radial", "green"):
        return cfg.testfn["kind"]
    raise InputError("--mode: cannot infer the criterion; pass --mode or a radial/green testfn block")


def _check_kind(cfg: ScenarioConfig, block: str, kind: str):
    got = getattr(cfg, block).get("kind")
    if got != kind:
        raise InputError(f"{block}.kind: {kind!r} required in this mode, got {got!r}")


def _radial_testfn(cfg: ScenarioConfig):
    d = cfg.build_density()
    return build_radial_testfn(d, cfg.inner_radius(), cfg.outer_radius(), cfg.m, validate=False)


def _green_testfn(cfg: ScenarioConfig):
    _require(cfg, "domain")
    q = RadialProfile.from_dict(cfg.testfn["q"])
    return green_superposition(q, cfg.build_domain(), cfg.t0(), validate=False)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_validate(cfg: ScenarioConfig, args) -> tuple[dict, int]:
    if cfg.testfn is None and cfg.envelope is None:
        raise InputError("testfn: validate needs a testfn or an envelope block")
    tol = cfg.tolerances
    out: dict = {}
    ok = True
    if cfg.testfn is not None:
        kind = cfg.testfn["kind"]
        entry: dict = {"kind": kind}
        try:
            if kind == "candidate":
                R = cfg.outer_radius()
                dom = ModelDomain.ball(R, cfg.m)
                prof = RadialProfile.from_dict(cfg.testfn["profile"])
                rep = validate_testfn(prof, dom, ClosedBall(cfg.inner_radius()), n_radii=tol["n_radii"],
                                      n_angles=tol["n_angles"], tol=tol["convexity"],
                                      laplacian_tol=tol["laplacian"])
                entry["report"] = rep.to_dict()
                ok &= rep.passed
            else:
                tf = _radial_testfn(cfg) if kind == "radial" else _green_testfn(cfg)
                rep = validate_testfn(tf, n_radii=tol["n_radii"], n_angles=tol["n_angles"],
                                      tol=tol["convexity"], laplacian_tol=tol["laplacian"])
                ext = extend_by_zero(tf)
                entry["report"] = rep.to_dict()
                entry["sup_bound"] = tf.sup_bound
                entry["extension"] = ext.collar.to_dict()
                ok &= rep.passed and ext.collar.passed
        except SbhError as exc:
            entry["report"] = {"passed": False, "failures": [{"axiom": "construction", "witness": str(exc)}]}
            ok = False
        out["testfn"] = entry
    if cfg.envelope is not None:
        entry = {"kind": cfg.envelope["kind"]}
        try:
            if cfg.envelope["kind"] == "radial":
                q = RadialProfile.from_dict(cfg.envelope["q"])
                conv = rc.check_convex_of_h(q, cfg.m, tolerance=tol["convexity"], n_points=tol["n_radii"])
                entry["report"] = conv.to_dict()
                ok &= conv.passed
            else:
                _require(cfg, "domain")
                env = growth_envelope_green(cfg.build_envelope_parts(), cfg.build_domain())
                entry["report"] = {"passed": True, **env.report}
        except SbhError as exc:
            entry["report"] = {"passed": False, "error": str(exc)}
            ok = False
        out["envelope"] = entry
    return {"validation": out, "passed": bool(ok)}, EXIT_OK if ok else EXIT_AXIOM


def _criterion(cfg: ScenarioConfig, mode: str):
    _require(cfg, "envelope", "testfn", "zeros")
    _check_kind(cfg, "envelope", mode)
    _check_kind(cfg, "testfn", mode)
    gf = cfg.tolerances["growth_factor"]
    Z = cfg.build_zeros()
    if mode == "radial":
        if cfg.n is None:
            raise InputError("dimension: radial criterion needs an even real dimension m = 2n")
        R = cfg.outer_radius()
        env = radial_envelope(RadialProfile.from_dict(cfg.envelope["q"]), cfg.n, R)
        return radial_verdict(env, cfg.build_density(), Z, cfg.inner_radius(), R, cfg.n, growth_factor=gf)
    _require(cfg, "domain")
    q = RadialProfile.from_dict(cfg.testfn["q"])
    return green_verdict(cfg.build_envelope_parts(), q, Z, cfg.build_domain(), cfg.t0(), growth_factor=gf)


def cmd_verdict(cfg: ScenarioConfig, args) -> tuple[dict, int]:
    try:
        rep = _criterion(cfg, args.mode)
    except (PreconditionError, ConstructionError) as exc:
        return {"criterion": None, "error": f"precondition failed: {exc}"}, EXIT_AXIOM
    if rep.unknown:
        code = EXIT_UNKNOWN
    elif rep.verdict == FORCED_ZERO:
        code = EXIT_OK
    else:
        code = EXIT_INCONCLUSIVE
    return {"criterion": rep.to_dict(), "verdict": rep.verdict}, code


def _write_csv(path, header, rows) -> int:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(x):.17g}" for x in row])
    return len(rows)


def cmd_emit(cfg: ScenarioConfig, args) -> tuple[dict, int]:
    n = cfg.tolerances["n_radii"]
    if args.what == "testfn":
        _require(cfg, "testfn")
        kind = cfg.testfn["kind"]
        if kind not in ("radial", "green"):
            raise InputError("testfn.kind: emit needs a radial or green test function")
        tf = _radial_testfn(cfg) if kind == "radial" else _green_testfn(cfg)
        if not tf.radial:
            raise InputError("domain.pole: profile dump needs a centre pole")
        r = np.linspace(tf.inner_radius, tf.outer_radius, n + 2)[1:-1]
        rows = list(zip(r, tf.radial_value(r)))
        header = ["r", "v"]
    elif args.what == "green":
        _require(cfg, "domain")
        dom = cfg.build_domain()
        if not dom.center_pole:
            raise InputError("domain.pole: level data dump needs a centre pole")
        q = None
        if cfg.testfn is not None and cfg.testfn.get("kind") == "green":
            q = RadialProfile.from_dict(cfg.testfn["q"])
            lo = level_radius(dom, cfg.t0())
        else:
            lo = 0.0
        r = np.linspace(lo, dom.R, n + 2)[1:-1]
        t = np.asarray(dom.green_radial(r), dtype=float)
        v = t if q is None else np.asarray(q(t), dtype=float)
        rows = list(zip(r, t, v))
        header = ["r", "t", "v"]
    else:
        mode = _mode_of(cfg, args.mode)
        rep = _criterion(cfg, mode)
        rows = [(c, v) for c, v in rep.zero.trace]
        header = ["cutoff", "value"]
    try:
        count = _write_csv(args.out, header, rows)
    except OSError as exc:
        raise InputError(f"--out: cannot write {args.out} ({exc.strerror})") from exc
    return {"emitted": {"what": args.what, "path": str(args.out), "rows": count, "columns": header}}, EXIT_OK


def cmd_ibp(cfg: ScenarioConfig, args) -> tuple[dict, int]:
    mode = _mode_of(cfg, args.mode)
    tol = cfg.tolerances
    warnings = []
    _require(cfg, "testfn")
    _check_kind(cfg, "testfn", mode)
    reports = []
    if mode == "radial":
        _require(cfg, "zeros")
        Z = cfg.build_zeros()
        if Z.points.size == 0 and Z.counting is not None:
            warnings.append("radial: direct sum needs explicit points; check skipped")
        elif cfg.m != 2:
            warnings.append("radial: direct sum needs m = 2; check skipped")
        else:
            reports.append(ibp_check_radial(cfg.build_density(), Z, cfg.inner_radius(), cfg.outer_radius(),
                                            cfg.m, tolerance=tol["ibp_radial"]))
    else:
        _require(cfg, "domain")
        q = RadialProfile.from_dict(cfg.testfn["q"])
        F = None
        if cfg.envelope is not None and cfg.envelope.get("kind") == "green":
            F = cfg.build_envelope_parts()
        Z = cfg.build_zeros() if cfg.zeros is not None else None
        if not q.closed_form:
            warnings.append("green: q is not a closed-form family; growth check skipped")
            F = None
        rep = ibp_check_green(q, cfg.build_domain(), cfg.t0(), F=F, Z=Z, delta=tol["ibp_delta"],
                              tol_smooth=tol["ibp_smooth"], tol_points=tol["ibp_points"])
        warnings.extend(rep.skipped)
        reports.append(rep)
    checks = [c for r in reports for c in r.checks]
    ok = all(c.passed for c in checks)
    return ({"ibp": {"mode": mode, "passed": ok, "checks": [c.to_dict() for c in checks]}, "warnings": warnings},
            EXIT_OK if ok else EXIT_IBP)


COMMANDS = {"validate": cmd_validate, "verdict": cmd_verdict, "emit": cmd_emit, "ibp": cmd_ibp}


def run(argv=None) -> tuple[dict, int]:
    """Parse ``argv`` and execute; returns ``(report, exit_code)``."""
    started = time.perf_counter()
    report: dict = {"verdict": None}
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return {**report, "error": f"usage: {exc}", "exit_code": EXIT_INPUT}, EXIT_INPUT
    report["command"] = args.command
    json_out = getattr(args, "json_out", None)
    try:
        if not getattr(args, "config", None):
            raise ConfigError("--config", "a scenario file is required")
        cfg = ScenarioConfig.load(args.config)
        cfg = cfg.with_overrides(parse_overrides(getattr(args, "tolerance_overrides", [])))
        report["scenario"] = cfg.to_dict()
        body, code = COMMANDS[args.command](cfg, args)
        report.update(body)
    except ConfigError as exc:
        report["error"] = f"config error at {exc}"
        code = EXIT_INPUT
    except InputError as exc:
        report["error"] = f"input error at {exc}"
        code = EXIT_INPUT
    except (SbhError, ValueError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_INPUT
    report["exit_code"] = code
    report["timing"] = {"seconds": time.perf_counter() - started}
    if json_out:
        try:
            with open(json_out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(dumps_report(report) + "\n")
        except OSError as exc:
            report["error"] = f"--json-out: cannot write {json_out} ({exc.strerror})"
            report["exit_code"] = code = EXIT_INPUT
    return report, code


def main(argv=None) -> int:
    report, code = run(argv)
    sys.stdout.write(dumps_report(report) + "\n")
    if "error" in report:
        sys.stderr.write(report["error"] + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
