"""Command-line driver: ``probconv <command> [flags]``.

Every command prints (or writes under ``--out``) one CSV or JSON table.
Exit status: 0 all checks pass, 1 a certification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import approx_bounds, engine, kernels, operators, pde_verify, spectral
from .errors import ProbConvError
from .functions import Cos, parse_function
from .quadrature import QuadratureSpec

COMMANDS = ("density", "moment", "symbol", "convolve", "identity", "pde-check", "bounds")
IDENTITY_CHECKS = ("duality", "combination", "semigroup", "weierstrass-difference-form")

DEFAULTS = {
    "kernel": "picard",
    "n": 1,
    "variant": "as-stated",
    "t": [1.0],
    "s": 0.5,
    "x": [0.0],
    "xi": [0.0, 0.5, 1.0, 2.0],
    "f": "cos",
    "a": 1.0,
    "x_min": -5.0,
    "x_max": 5.0,
    "points": 101,
    "t_min": None,
    "t_max": None,
    "t_points": None,
    "eps_tail": 1e-12,
    "panels": 64,
    "nodes_per_panel": 16,
    "levels": 3,
    "k": 1,
    "source": "operator",
    "method": "analytic",
    "path": "direct",
    "check": "duality",
    "kind": "picard",
    "which": "mb",
    "format": "csv",
    "out": None,
    "seed": None,
    "strict": False,
}


class UsageError(Exception):
    pass


def _g(v) -> str:
    if isinstance(v, float) or isinstance(v, np.floating):
        return format(float(v), ".17g")
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with any of the flags below (flags win)")
    common.add_argument("--kernel", help="mb, picard, exponential, weierstrass, picard-jackson, weierstrass-jackson")
    common.add_argument("--n", type=int, help="Jackson order n >= 1")
    common.add_argument("--variant", choices=["as-stated", "corrected"])
    common.add_argument("--t", type=float, nargs="+", help="one or more t values")
    common.add_argument("--f", help="cos, sin, bump, abs-sin, hat, constant[:c], csv:<path>")
    common.add_argument("--a", type=float, help="frequency of cos/sin/abs-sin")
    common.add_argument("--x-min", type=float)
    common.add_argument("--x-max", type=float)
    common.add_argument("--points", type=int, help="number of grid nodes")
    common.add_argument("--eps-tail", type=float)
    common.add_argument("--panels", type=int, help="panels per side")
    common.add_argument("--nodes-per-panel", type=int)
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="directory for <command>-<kernel>-<timestamp> files")
    common.add_argument("--seed", type=int, help="accepted for reproducibility; no command draws random numbers")
    common.add_argument("--strict", action="store_true", default=None,
                        help="treat the expected Weierstrass difference-form gap as a failure")

    p = argparse.ArgumentParser(prog="probconv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("density", parents=[common], help="evaluate d(t, x)")
    sp.add_argument("--x", type=float, nargs="+")

    sp = sub.add_parser("moment", parents=[common], help="first absolute moment phi(t)")
    sp.add_argument("--method", choices=["analytic", "quadrature"])

    sp = sub.add_parser("symbol", parents=[common], help="Fourier multiplier and its PDE residual")
    sp.add_argument("--xi", type=float, nargs="+")

    sp = sub.add_parser("convolve", parents=[common], help="O_t(f) on a grid")
    sp.add_argument("--path", choices=["direct", "fft"])

    sp = sub.add_parser("identity", parents=[common], help="structural identities between operators")
    sp.add_argument("--check", choices=IDENTITY_CHECKS)
    sp.add_argument("--kind", choices=["picard", "weierstrass"])
    sp.add_argument("--s", type=float, help="second time for the semigroup check")

    sp = sub.add_parser("pde-check", parents=[common], help="finite-difference order study")
    sp.add_argument("--levels", type=int)
    sp.add_argument("--k", type=int, help="Jackson component index")
    sp.add_argument("--source", choices=["operator", "manufactured"])
    sp.add_argument("--t-min", type=float)
    sp.add_argument("--t-max", type=float)
    sp.add_argument("--t-points", type=int)

    sp = sub.add_parser("bounds", parents=[common], help="certify approximation inequalities")
    sp.add_argument("--which", choices=list(approx_bounds.BOUND_IDS))
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}") from exc
        for key, value in from_file.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise UsageError(f"config: unknown field {key!r}")
            cfg[key] = value
    for key, value in vars(args).items():
        if key in ("config",) or value is None:
            continue
        cfg[key] = value
    if not isinstance(cfg["t"], list):
        cfg["t"] = [cfg["t"]]
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if any(not (isinstance(t, (int, float)) and t > 0 and math.isfinite(t)) for t in cfg["t"]):
        raise UsageError(f"--t: every value must be a positive real, got {cfg['t']}")
    if cfg["n"] < 1:
        raise UsageError(f"--n: Jackson order must be >= 1, got {cfg['n']}")
    if cfg["points"] < 2:
        raise UsageError(f"--points: need at least 2 nodes, got {cfg['points']}")
    if not cfg["x_max"] > cfg["x_min"]:
        raise UsageError("--x-max must exceed --x-min")
    if not 0 < cfg["eps_tail"] < 1:
        raise UsageError(f"--eps-tail must lie in (0, 1), got {cfg['eps_tail']}")
    if cfg["panels"] < 4:
        raise UsageError(f"--panels must be >= 4, got {cfg['panels']}")
    if not 4 <= cfg["nodes_per_panel"] <= 64:
        raise UsageError(f"--nodes-per-panel must lie in [4, 64], got {cfg['nodes_per_panel']}")
    if cfg["levels"] < 2:
        raise UsageError(f"--levels must be >= 2, got {cfg['levels']}")
    if cfg["t_min"] is not None and cfg["t_min"] <= 0:
        raise UsageError("--t-min must be positive")
    try:
        _kernel(cfg)
    except (ValueError, ProbConvError) as exc:
        raise UsageError(f"--kernel: {exc}") from exc
    try:
        _function(cfg)
    except (ValueError, OSError) as exc:
        raise UsageError(f"--f: {exc}") from exc


def _kernel(cfg) -> kernels.KernelId:
    return kernels.parse_kernel(cfg["kernel"], cfg["n"], cfg["variant"])


def _function(cfg):
    return parse_function(cfg["f"], cfg["a"])


def _quad(cfg) -> QuadratureSpec:
    return QuadratureSpec(eps_tail=cfg["eps_tail"], panels_per_side=cfg["panels"],
                          nodes_per_panel=cfg["nodes_per_panel"])


def _grid(cfg) -> engine.GridSpec:
    return engine.GridSpec(cfg["x_min"], cfg["x_max"], cfg["points"])


class Table:
    """Named columns plus rows; optional trailing records and a status."""

    def __init__(self, columns, rows, trailer=None, failed=False, extra=None):
        self.columns = list(columns)
        self.rows = rows
        self.trailer = trailer or []
        self.failed = failed
        self.extra = extra or {}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_g(v) for v in row])
        for rec in self.trailer:
            w.writerow([_g(v) for v in rec])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"columns": self.columns,
               "rows": [dict(zip(self.columns, [_jsonable(v) for v in row])) for row in self.rows]}
        for rec in self.trailer:
            doc[rec[0]] = _jsonable(rec[1])
        doc.update(self.extra)
        return json.dumps(doc, indent=2) + "\n"


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def cmd_density(cfg) -> Table:
    k = _kernel(cfg)
    rows = [(k.name, float(t), float(x), kernels.eval_density(k, t, x))
            for t in cfg["t"] for x in cfg["x"]]
    return Table(["kernel", "t", "x", "density"], rows)


def cmd_moment(cfg) -> Table:
    k = _kernel(cfg)
    rows = [(k.name, float(t), cfg["method"], kernels.first_abs_moment(k, t, cfg["method"], _quad(cfg)))
            for t in cfg["t"]]
    return Table(["kernel", "t", "method", "moment"], rows)


def cmd_symbol(cfg) -> Table:
    k = _kernel(cfg)
    rows = []
    for t in cfg["t"]:
        for xi in cfg["xi"]:
            rows.append((k.name, float(t), float(xi), spectral.symbol(k, t, xi),
                         spectral.symbol_dt(k, t, xi), spectral.symbol_pde_residual(k, t, xi)))
    failed = any(r[-1] > 1e-12 for r in rows)
    return Table(["kernel", "t", "xi", "symbol", "symbol_dt", "pde_residual"], rows, failed=failed)


def cmd_convolve(cfg) -> Table:
    k = _kernel(cfg)
    gf = operators.operator(k, cfg["t"][0], _function(cfg), _grid(cfg), _quad(cfg), cfg["path"])
    rows = list(zip(gf.x.tolist(), gf.values.tolist()))
    return Table(["x", "value"], rows)


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def cmd_identity(cfg) -> Table:
    f, grid, quad = _function(cfg), _grid(cfg), _quad(cfg)
    check, n = cfg["check"], cfg["n"]
    cols = ["check", "kind", "n", "t", "gap", "expected", "tolerance", "status"]
    rows = []
    for t in cfg["t"]:
        t = float(t)
        if check == "duality":
            gap = operators.duality_gap(t, f, grid, quad)
            rows.append((check, "exponential-vs-picard", "", t, gap, 0.0, 1e-9, _status(gap < 1e-9)))
        elif check == "combination":
            gaps = operators.combination_identity_gap(cfg["kind"], n, t, f, grid, quad, cfg["variant"])
            gap = gaps.kernel_vs_combination
            rows.append((check, cfg["kind"], n, t, gap, 0.0, 1e-8, _status(gap < 1e-8)))
        elif check == "semigroup":
            s = float(cfg["s"])
            gap = operators.semigroup_gap(t, s, f, grid, quad)
            rows.append((f"semigroup(s={_g(s)})", "weierstrass", "", t, gap, 0.0, 1e-6, _status(gap < 1e-6)))
        else:
            gaps = operators.combination_identity_gap("weierstrass", n, t, f, grid, quad,
                                                      kernels.Variant.AS_STATED)
            gap = gaps.difference_vs_kernel
            expected = math.nan
            if isinstance(f, Cos):
                stated = spectral.symbol(kernels.weierstrass_jackson(n), t, f.a)
                corrected = spectral.symbol(kernels.weierstrass_jackson(n, "corrected"), t, f.a)
                expected = abs(corrected - stated)
            status = "FAIL" if cfg["strict"] else "WARN"
            rows.append((check, "weierstrass", n, t, gap, expected, 1e-6, status))
    failed = any(r[-1] == "FAIL" for r in rows)
    return Table(cols, rows, failed=failed)


def cmd_pde_check(cfg) -> Table:
    k = _kernel(cfg)
    exponential = k.family is kernels.Family.EXPONENTIAL
    t_min = cfg["t_min"] if cfg["t_min"] is not None else (1.0 if exponential else 0.5)
    t_max = cfg["t_max"] if cfg["t_max"] is not None else (3.0 if exponential else 1.5)
    t_points = cfg["t_points"] or (21 if exponential else 11)
    x_grid = engine.GridSpec(cfg["x_min"], cfg["x_max"], cfg["points"])
    t_grid = engine.GridSpec(t_min, t_max, t_points)
    report = pde_verify.order_study(k, _function(cfg), x_grid, t_grid, cfg["levels"],
                                    cfg["source"], cfg["k"], _quad(cfg))
    rows = [(i, lv.dx, lv.dt, lv.max_residual, lv.rms_residual) for i, lv in enumerate(report.levels)]
    return Table(["level", "dx", "dt", "max_residual", "rms_residual"], rows,
                 trailer=[("observed_order", report.observed_order)], failed=not report.passed,
                 extra={"pde": report.pde, "kernel": report.kernel, "k": report.k,
                        "source": report.source, "passed": report.passed})


def cmd_bounds(cfg) -> Table:
    kernel = _kernel(cfg) if cfg["which"] == "general" else None
    variant = cfg["variant"] if cfg["which"] == "weierstrass-jackson" else None
    rows = approx_bounds.certify_bound(cfg["which"], _function(cfg), cfg["t"], kernel, cfg["n"],
                                       variant or kernels.Variant.CORRECTED, _quad(cfg))
    table = [(r.bound, r.f, r.t, r.lhs, r.rhs, r.ratio, r.pass_text) for r in rows]
    failed = any(r.passed is False for r in rows)
    return Table(["bound", "f", "t", "lhs", "rhs", "ratio", "pass"], table, failed=failed)


HANDLERS = {
    "density": cmd_density,
    "moment": cmd_moment,
    "symbol": cmd_symbol,
    "convolve": cmd_convolve,
    "identity": cmd_identity,
    "pde-check": cmd_pde_check,
    "bounds": cmd_bounds,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"probconv: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        table = HANDLERS[cfg["command"]](cfg)
    except ProbConvError as exc:
        print(f"probconv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = table.to_json() if cfg["format"] == "json" else table.to_csv()
    if cfg["out"]:
        os.makedirs(cfg["out"], exist_ok=True)
        stamp = time.strftime("%Y%m%dT%H%M%S")
        name = f"{cfg['command']}-{cfg['kernel']}-{stamp}.{cfg['format']}"
        with open(os.path.join(cfg["out"], name), "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if any(r and r[-1] == "WARN" for r in table.rows):
        print("probconv: WARN expected gap between the two printed Weierstrass-Jackson forms",
              file=sys.stderr)
    return 1 if table.failed else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
