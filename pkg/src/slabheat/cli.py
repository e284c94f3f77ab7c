"""``slabheat`` command-line interface.

    slabheat <solve|coeffs|verify|compare|plot> [--config PATH] [overrides...]

The config file is YAML with a ``problem`` section and one optional
section per command; command-line flags win over the file. Data goes to
files (or stdout for reports); diagnostics go to stderr.

Exit status: 0 on success, 1 when the command's check fails (verify,
compare tolerance, quadrature), 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import importlib
import json
import os
import sys
from typing import Any

import numpy as np
import yaml

from .domain import (
    CallableProfile,
    Constant,
    PiecewiseLinear,
    Polynomial,
    SingleMode,
    SlabProblem,
    validate_problem,
)
from .errors import ConfigError, QuadratureNonConvergence, SlabHeatError
from .fourier import CLOSED_FORM, DEFAULT_TOL, QUADRATURE, abs_integral, has_closed_form, sine_coefficient
from .oracle import FdConfig, compare, solve_fd
from .plot import read_profiles, render_svg
from .series import SeriesSolution, evaluate_grid, select_truncation, tail_bound, write_grid_csv
from .verify import Sabotage, run_battery

#: set to 1 to expose the --sabotage hook of ``verify`` (test runs only)
TESTING_ENV = "SLABHEAT_TESTING"

DEFAULT_PROBLEM = {
    "length": 1.0,
    "diffusivity": 1.0,
    "profile": {"kind": "polynomial", "coefficients": [0.0, 1.0, -1.0]},
}


def parse_profile(spec: dict[str, Any]):
    try:
        kind = spec["kind"]
        if kind == "single_mode":
            return SingleMode(int(spec["mode"]), float(spec.get("amplitude", 1.0)))
        if kind == "polynomial":
            return Polynomial(spec["coefficients"])
        if kind == "constant":
            return Constant(float(spec["value"]))
        if kind == "piecewise_linear":
            return PiecewiseLinear.from_points(spec["points"])
        if kind == "callable":
            module, _, attr = spec["target"].partition(":")
            return CallableProfile(getattr(importlib.import_module(module), attr))
    except (KeyError, TypeError, ValueError, ImportError, AttributeError) as exc:
        raise ConfigError(f"bad profile {spec!r}: {exc}") from None
    raise ConfigError(f"unknown profile kind {kind!r}")


def load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def build_problem(cfg: dict[str, Any], args: argparse.Namespace) -> SlabProblem:
    section = {**DEFAULT_PROBLEM, **cfg.get("problem", {})}
    if args.length is not None:
        section["length"] = args.length
    if args.diffusivity is not None:
        section["diffusivity"] = args.diffusivity
    try:
        problem = SlabProblem(
            float(section["length"]), float(section["diffusivity"]), parse_profile(section["profile"])
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad problem section: {exc}") from None
    return validate_problem(problem)


def settings(cfg: dict[str, Any], command: str, args: argparse.Namespace, defaults: dict[str, Any]) -> dict[str, Any]:
    """Merge defaults < config section < explicit flags."""
    out = dict(defaults)
    out.update(cfg.get(command) or {})
    for key in defaults:
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def _choose_n(problem: SlabProblem, s: dict[str, Any], times) -> tuple[int, dict[str, Any]]:
    if s.get("n_modes") is not None:
        return int(s["n_modes"]), {"n_modes": int(s["n_modes"]), "selected": False}
    positive = [t for t in times if t > 0]
    t_min = s.get("t_min")
    if t_min is None:
        if not positive:
            raise ConfigError("need n_modes, or t_min / a positive time to select truncation")
        t_min = min(positive)
    target = float(s["target_error"])
    K_int = abs_integral(problem.initial_profile, problem.length)
    n = select_truncation(problem, target, float(t_min), abs_f_integral=K_int)
    K = 2.0 / problem.length * K_int
    bound = tail_bound(K, problem.diffusivity, problem.length, n, float(t_min)).bound
    return n, {
        "n_modes": n,
        "selected": True,
        "target_error": target,
        "t_min": float(t_min),
        "tail_bound_at_t_min": bound,
    }


def cmd_solve(args, cfg) -> int:
    problem = build_problem(cfg, args)
    s = settings(
        cfg,
        "solve",
        args,
        {
            "n_modes": None,
            "target_error": 1e-8,
            "t_min": None,
            "times": [0.0, 0.01, 0.1, 1.0],
            "n_x": 101,
            "output": "solution.csv",
            "metadata": None,
            "workers": 1,
        },
    )
    times = [float(t) for t in s["times"]]
    n, meta = _choose_n(problem, s, times)
    sol = SeriesSolution.build(problem, n)
    xs = np.linspace(0.0, problem.length, int(s["n_x"]))
    rows = evaluate_grid(sol, xs, times, workers=int(s["workers"]))
    with _open_out(s["output"]) as fh:
        write_grid_csv(rows, fh)
    meta_path = s["metadata"] or s["output"] + ".meta.json"
    meta.update({"length": problem.length, "diffusivity": problem.diffusivity})
    with _open_out(meta_path) as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {s['output']} ({len(rows)} rows, N={n})", file=sys.stderr)
    return 0


def cmd_coeffs(args, cfg) -> int:
    problem = build_problem(cfg, args)
    s = settings(cfg, "coeffs", args, {"n_modes": 16, "tol": DEFAULT_TOL, "output": "coeffs.csv"})
    f, L = problem.initial_profile, problem.length
    method = CLOSED_FORM if has_closed_form(f) else QUADRATURE
    failed = []
    with _open_out(s["output"]) as fh:
        fh.write("w,B_w,method,est_error\n")
        for w in range(1, int(s["n_modes"]) + 1):
            try:
                b, err = sine_coefficient(f, w, L, float(s["tol"]))
                tag = method
            except QuadratureNonConvergence as exc:
                b, err, tag = exc.estimate, exc.estimated_error, "quadrature_failed"
                failed.append(w)
                print(f"mode {w}: {exc}", file=sys.stderr)
            fh.write(f"{w},{float(b)!r},{tag},{float(err)!r}\n")
    if failed:
        print(f"coeffs: quadrature failed for modes {failed}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args, cfg) -> int:
    problem = build_problem(cfg, args)
    s = settings(cfg, "verify", args, {"n_modes": 64, "seed": 0})
    sabotage = None
    if getattr(args, "sabotage", None):
        sabotage = _parse_sabotage(args.sabotage)
    results = run_battery(problem, int(s["n_modes"]), int(s["seed"]), sabotage)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"verify: FAILED {failed[0].name} ({len(failed)} of {len(results)} checks failed)", file=sys.stderr)
        return 1
    return 0


def _parse_sabotage(words: list[str]) -> Sabotage:
    if words[0] == "flip-sign-mode" and len(words) == 2:
        try:
            return Sabotage(flip_mode=int(words[1]))
        except ValueError:
            pass
    elif words == ["break-decay"]:
        return Sabotage(break_decay=True)
    raise ConfigError(f"unknown sabotage {' '.join(words)!r}")


def cmd_compare(args, cfg) -> int:
    problem = build_problem(cfg, args)
    s = settings(
        cfg,
        "compare",
        args,
        {
            "n_modes": None,
            "target_error": 1e-8,
            "t_min": None,
            "times": [0.1],
            "n_x": 401,
            "dt": 1e-5,
            "tolerance": 1e-3,
            "series_output": "compare_series.csv",
            "fd_output": "compare_fd.csv",
            "summary_output": None,
        },
    )
    times = [float(t) for t in s["times"]]
    n, meta = _choose_n(problem, s, times)
    sol = SeriesSolution.build(problem, n)
    fd = solve_fd(problem, FdConfig(int(s["n_x"]), float(s["dt"]), max(times)), times)
    reports = [compare(sol, fd, t) for t in times]

    rows = evaluate_grid(sol, fd.x, [r.t_actual for r in reports])
    with _open_out(s["series_output"]) as fh:
        write_grid_csv(rows, fh)
    with _open_out(s["fd_output"]) as fh:
        fd.write_csv(fh)

    worst = max(r.max_abs for r in reports)
    summary = {
        "n_modes": n,
        "tolerance": float(s["tolerance"]),
        "max_abs": worst,
        "snapshots": [r.__dict__ for r in reports],
    }
    for r in reports:
        print(f"t={r.t_actual:.6g} max_abs={r.max_abs:.3e} rms={r.rms:.3e} tail_bound={r.tail_bound}")
    if s["summary_output"]:
        with _open_out(s["summary_output"]) as fh:
            json.dump(summary, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if not worst <= float(s["tolerance"]):
        print(f"compare: max difference {worst:.3e} exceeds tolerance {float(s['tolerance']):.3e}", file=sys.stderr)
        return 1
    return 0


def cmd_plot(args, cfg) -> int:
    s = settings(cfg, "plot", args, {"input": "solution.csv", "output": "solution.svg"})
    try:
        with open(s["input"], encoding="utf-8", newline="") as fh:
            profiles = read_profiles(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {s['input']}: {exc.strerror}") from None
    with _open_out(s["output"]) as fh:
        fh.write(render_svg(profiles))
    return 0


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slabheat", description="1D slab heat conduction by sine series")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--length", type=float)
        p.add_argument("--diffusivity", type=float)
        return p

    def truncation(p):
        p.add_argument("--n-modes", dest="n_modes", type=int)
        p.add_argument("--target-error", dest="target_error", type=float)
        p.add_argument("--t-min", dest="t_min", type=float)
        p.add_argument("--times", type=_float_list, help="comma-separated snapshot times")

    p = common(sub.add_parser("solve", help="evaluate the series on a grid"))
    truncation(p)
    p.add_argument("--n-x", dest="n_x", type=int)
    p.add_argument("--output")
    p.add_argument("--metadata")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("coeffs", help="export Fourier sine coefficients"))
    p.add_argument("--n-modes", dest="n_modes", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--output")
    p.set_defaults(func=cmd_coeffs)

    p = common(sub.add_parser("verify", help="run the property battery"))
    p.add_argument("--n-modes", dest="n_modes", type=int)
    p.add_argument("--seed", type=int)
    if os.environ.get(TESTING_ENV) == "1":
        p.add_argument("--sabotage", nargs="+", metavar="MODE")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("compare", help="series vs Crank-Nicolson"))
    truncation(p)
    p.add_argument("--n-x", dest="n_x", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--series-output", dest="series_output")
    p.add_argument("--fd-output", dest="fd_output")
    p.add_argument("--summary-output", dest="summary_output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render a grid CSV as SVG")
    p.add_argument("--config")
    p.add_argument("--input")
    p.add_argument("--output")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (SlabHeatError, ValueError) as exc:
        message = " ".join(str(exc).split())
        print(f"slabheat {args.command}: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
