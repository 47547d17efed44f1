"""Command-line driver.

    anihsi profile --alpha 3,6
    anihsi rho --alpha 2,2 --point 3,4
    anihsi hsi apply|symbol|converge ...
    anihsi spectral apply ...
    anihsi potential invert ...
    anihsi approx study ...
    anihsi check --suite lemmas

Settings are resolved as flag > JSON config file (--config) > built-in
default. Every CSV/JSON artifact starts with the resolved configuration.
Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, fields, replace
from typing import Callable, Optional

import numpy as np

from . import approx, hsi, lemmasuite, potentials, spectral
from .distance import rho_lam
from .errors import AnihsiError, InputError, NumericalError, UnsupportedBranchError
from .field import GridSpec, gaussian, sample, tensor_bump, zero_mass_gaussian
from .mixednorm import exponents
from .profile import check_admissibility, derive_profile

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def fmt(v) -> str:
    return "{:.17g}".format(float(v))


def thread_cap() -> int:
    raw = os.environ.get("ANIHSI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"ANIHSI_THREADS must be an integer, got {raw!r}")


def ordered_map(fn: Callable, items) -> list:
    """map with up to ANIHSI_THREADS workers; results keep input order."""
    items = list(items)
    workers = min(thread_cap(), len(items)) or 1
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- parsing helpers

def floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of numbers, got {text!r}")


def points(value) -> list:
    """--point values: "3,4" strings, or lists from a config file."""
    if value is None:
        return []
    if isinstance(value, str):
        return [floats(value)]
    if value and isinstance(value[0], (int, float)):
        return [floats(value)]
    return [floats(v) for v in value]


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


DEFAULTS = {
    "alpha": None,
    "point": None,
    "ell": None,
    "eps": [0.0],
    "eps0": 0.5,
    "count": 8,
    "fixture": "gaussian",
    "width": 1.0,
    "L": 8.0,
    "N": 64,
    "symbol": "liouville",
    "power": 1.0,
    "sizes": ["8:32", "16:64"],
    "p": None,
    "r": None,
    "schedule": None,
    "suite": "lemmas",
    "seed": 0,
    "quadrature": {},
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over DEFAULTS."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file: {exc}")
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
    out = {}
    for key, default in {**DEFAULTS, **getattr(args, "cmd_defaults", {})}.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else cfg.get(key, default)
    return out


def quadrature_config(cfg: dict) -> hsi.HsiQuadratureConfig:
    known = {f.name for f in fields(hsi.HsiQuadratureConfig)}
    extra = set(cfg["quadrature"]) - known
    if extra:
        raise InputError(f"unknown quadrature keys: {sorted(extra)}")
    return replace(hsi.DEFAULT_CONFIG, **cfg["quadrature"])


def validate(cfg: dict, need: tuple) -> None:
    """Check every precondition up front; raise one InputError listing all problems."""
    problems = []

    def check(cond, msg):
        if not cond:
            problems.append(msg)

    alpha = None
    if "alpha" in need:
        try:
            alpha = floats(cfg["alpha"]) if cfg["alpha"] is not None else None
        except InputError as exc:
            problems.append(str(exc))
        check(alpha, "--alpha is required")
        if alpha:
            check(all(math.isfinite(a) and a > 0 for a in alpha), "alpha entries must be positive")
    n = len(alpha) if alpha else None
    if "point" in need:
        try:
            pts = points(cfg["point"])
            check(pts, "--point is required")
            if n is not None:
                check(all(len(p) == n for p in pts), f"every point needs {n} coordinates")
        except InputError as exc:
            problems.append(str(exc))
    if "grid" in need:
        N, L = cfg["N"], cfg["L"]
        check(isinstance(N, int) and N >= 4 and N % 2 == 0, "N must be an even integer >= 4")
        check(isinstance(L, (int, float)) and L > 0, "L must be positive")
    if "eps" in need:
        try:
            check(all(e >= 0 for e in floats(cfg["eps"])), "eps values must be >= 0")
        except InputError as exc:
            problems.append(str(exc))
    if "pr" in need:
        for key in ("p", "r"):
            try:
                vals = exponents(floats(cfg[key]) if cfg[key] is not None else [2.0] * (n or 1))
                if n is not None:
                    check(len(vals) == n, f"--{key} needs {n} entries")
            except InputError as exc:
                problems.append(f"--{key}: {exc}")
    if "fixture" in need:
        check(cfg["fixture"] in FIXTURES, f"fixture must be one of {sorted(FIXTURES)}")
        check(cfg["width"] > 0, "width must be positive")
    if "ell" in need and cfg["ell"] is not None and alpha:
        check(2 * cfg["ell"] > max(alpha), "2*ell must exceed max(alpha)")
    try:
        quadrature_config(cfg)
    except (InputError, TypeError) as exc:
        problems.append(str(exc))
    if problems:
        raise InputError("; ".join(problems))


FIXTURES = {
    "gaussian": lambda n, a: gaussian(a, n),
    "zero-mass-gaussian": lambda n, a: zero_mass_gaussian(a, n),
    "bump": lambda n, a: tensor_bump(n, a),
}


# ---------------------------------------------------------------- output

def canonical(cfg: dict) -> dict:
    """The resolved config with list options parsed and quadrature knobs expanded."""
    out = dict(cfg)
    for key in ("alpha", "eps", "p", "r"):
        if out.get(key) is not None:
            out[key] = floats(out[key])
    out["point"] = points(out.get("point")) or None
    out["quadrature"] = asdict(quadrature_config(cfg))
    return out


class Output:
    """Single writer for one artifact: a config header, then rows."""

    def __init__(self, path: Optional[str], cfg: dict, command: str):
        self.path = path
        self.lines = [f"# {json.dumps({'command': command, **canonical(cfg)}, sort_keys=True)}"]

    def row(self, *cells) -> None:
        self.lines.append(",".join(c if isinstance(c, str) else fmt(c) for c in cells))

    def close(self, summary: str) -> None:
        text = "\n".join(self.lines) + "\n"
        if self.path and self.path != "-":
            with open(self.path, "w", newline="\n") as fh:
                fh.write(text)
            print(summary)
        else:
            sys.stdout.write(text)
            print(summary, file=sys.stderr)


def write_json(path: Optional[str], payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n"
    if path and path != "-":
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_profile(args, cfg):
    validate(cfg, ("alpha",))
    rec = derive_profile(floats(cfg["alpha"])).to_record()
    write_json(args.out, rec)
    return EXIT_OK


def cmd_rho(args, cfg):
    validate(cfg, ("alpha", "point"))
    prof = derive_profile(floats(cfg["alpha"]))
    vals = rho_lam(np.array(points(cfg["point"])), prof.lam_array)
    for v in vals:
        print(fmt(v))
    return EXIT_OK


def _setup(cfg):
    prof = derive_profile(floats(cfg["alpha"]))
    adm = check_admissibility(prof)
    if not adm.valid:
        # the verdict is informational; the study still runs
        print(f"anihsi: warning: admissibility fails at k={list(adm.violating_index)}",
              file=sys.stderr)
    return prof, FIXTURES[cfg["fixture"]](prof.n, float(cfg["width"])), quadrature_config(cfg)


def cmd_hsi_apply(args, cfg):
    validate(cfg, ("alpha", "point", "eps", "fixture", "ell"))
    prof, f, qc = _setup(cfg)
    pts = np.array(points(cfg["point"]))
    jobs = [(e, p) for e in floats(cfg["eps"]) for p in pts]

    def one(job):
        e, p = job
        return hsi.truncated_hsi(f, p, prof, cfg["ell"], replace(qc, eps=e))

    res = ordered_map(one, jobs)
    out = Output(args.out, cfg, "hsi apply")
    out.row("eps", *[f"x{i + 1}" for i in range(prof.n)], "value", "error_estimate")
    for (e, p), r in zip(jobs, res):
        out.row(e, *p, float(np.real(r.value)), r.error)
    out.close(f"hsi apply: {len(jobs)} values")
    return EXIT_OK


def cmd_hsi_symbol(args, cfg):
    validate(cfg, ("alpha", "eps", "grid", "ell"))
    prof, _, qc = _setup({**cfg, "fixture": "gaussian", "width": 1.0})
    grid = GridSpec(prof.n, float(cfg["L"]), int(cfg["N"]))
    eps_list = floats(cfg["eps"])
    tables = ordered_map(lambda e: hsi.truncated_symbol_table(grid, e, prof, cfg["ell"], qc), eps_list)
    xi = grid.dual_points().reshape(-1, prof.n)
    out = Output(args.out, cfg, "hsi symbol")
    out.row("eps", *[f"xi{i + 1}" for i in range(prof.n)], "value")
    for e, t in zip(eps_list, tables):
        for node, v in zip(xi, t.values.ravel()):
            out.row(e, *node, v)
    out.close(f"hsi symbol: {len(eps_list)} tables of {xi.shape[0]} nodes")
    return EXIT_OK


def cmd_hsi_converge(args, cfg):
    validate(cfg, ("alpha", "point", "fixture", "ell"))
    prof, f, qc = _setup(cfg)
    pts = np.array(points(cfg["point"]))
    seq = hsi.default_eps_sequence(float(cfg["eps0"]), int(cfg["count"]))
    failures = []

    def one(p):
        try:
            return hsi.hsi_limit(f, p, prof, cfg["ell"], seq, qc)
        except NumericalError as exc:
            failures.append(str(exc))
            return getattr(exc, "report", None)

    reports = ordered_map(one, pts)
    out = Output(args.out, cfg, "hsi converge")
    out.row(*[f"x{i + 1}" for i in range(prof.n)], "eps", "value", "error_estimate")
    for p, rep in zip(pts, reports):
        if rep is None:
            continue
        for e, v, er in zip(rep.eps, rep.values, rep.errors):
            out.row(*p, e, float(np.real(v)), er)
        out.row(*p, 0.0, float(np.real(rep.limit)), rep.limit_error)
    slopes = ",".join(fmt(r.slope) for r in reports if r is not None)
    out.close(f"hsi converge: {len(pts)} points, delta slopes {slopes}"
              + (f", {len(failures)} not converged" if failures else ""))
    if failures:
        print("; ".join(failures), file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_spectral_apply(args, cfg):
    validate(cfg, ("alpha", "grid", "fixture"))
    prof, f, _ = _setup(cfg)
    if cfg["symbol"] not in ("liouville", "rho-power"):
        raise InputError("symbol must be liouville or rho-power")
    grid = GridSpec(prof.n, float(cfg["L"]), int(cfg["N"]))
    table = (spectral.liouville_table(grid, prof) if cfg["symbol"] == "liouville"
             else spectral.rho_power_table(grid, prof, float(cfg["power"])))
    g = spectral.apply_symbol(sample(f, grid), table)
    out = Output(args.out, cfg, "spectral apply")
    out.row(*[f"x{i + 1}" for i in range(prof.n)], "value")
    for x, v in zip(grid.points().reshape(-1, prof.n), np.real(g.values).ravel()):
        out.row(*x, v)
    out.close(f"spectral apply: {g.values.size} nodes, max |value| {fmt(np.abs(g.values).max())}")
    return EXIT_OK


def _sizes(cfg) -> list:
    out = []
    for item in cfg["sizes"] if isinstance(cfg["sizes"], list) else str(cfg["sizes"]).split(","):
        try:
            L, N = str(item).split(":")
            out.append((float(L), int(N)))
        except ValueError:
            raise InputError(f"grid sizes are L:N pairs, got {item!r}")
    return out


def cmd_potential_invert(args, cfg):
    validate(cfg, ("alpha", "fixture"))
    prof, f, qc = _setup(cfg)
    sizes = _sizes(cfg)
    for L, N in sizes:
        GridSpec(prof.n, L, N)
    kernel = potentials.PotentialKernel(prof, cfg["ell"], symbol_config=qc)

    def one(size):
        grid = GridSpec(prof.n, *size)
        return (potentials.inversion_residual(f, prof, grid, kernel, qc),
                potentials.spectral_inversion_residual(f, prof, grid, cfg["ell"], qc))

    res = ordered_map(one, sizes)
    out = Output(args.out, cfg, "potential invert")
    out.row("L", "N", "residual", "spectral_residual")
    for (L, N), (a, b) in zip(sizes, res):
        out.row(L, N, a, b)
    out.close(f"potential invert: final residual {fmt(res[-1][0])}")
    return EXIT_OK


def _schedule(cfg) -> approx.ApproximationSchedule:
    if cfg["schedule"] is None:
        return approx.ApproximationSchedule.default()
    spec = cfg["schedule"]
    if isinstance(spec, str):
        try:
            with open(spec) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read schedule: {exc}")
    try:
        return approx.ApproximationSchedule(tuple(float(d) for d in spec["deltas"]),
                                            tuple(float(r) for r in spec["radii"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"schedule needs 'deltas' and 'radii' lists ({exc})")


def cmd_approx_study(args, cfg):
    validate(cfg, ("alpha", "grid", "pr", "fixture"))
    prof, f, _ = _setup(cfg)
    p = floats(cfg["p"]) if cfg["p"] is not None else [2.0] * prof.n
    r = floats(cfg["r"]) if cfg["r"] is not None else [2.0] * prof.n
    grid = GridSpec(prof.n, float(cfg["L"]), int(cfg["N"]))
    rep = approx.denseness_study(f, prof, p, r, _schedule(cfg), grid)
    out = Output(args.out, cfg, "approx study")
    out.row("delta", "N", "error", "relative")
    for row in rep.rows:
        out.row(row.delta, row.N, row.error, row.relative)
    out.close(f"approx study: initial {fmt(rep.initial)}, final relative {fmt(rep.final.relative)}")
    return EXIT_OK


def cmd_check(args, cfg):
    if cfg["suite"] != "lemmas":
        raise InputError("only the 'lemmas' suite exists")
    reports = lemmasuite.default_suite(seed=int(cfg["seed"]))
    hard = [r for r in reports if r.applicable and not r.passed]
    write_json(args.out, {"config": canonical(cfg), "passed": not hard,
                          "probes": [r.to_record() for r in reports]})
    print(f"check lemmas: {len(reports) - len(hard)}/{len(reports)} probes passed", file=sys.stderr)
    return EXIT_NUMERIC if hard else EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    top = Parser(prog="anihsi", description="Anisotropic hypersingular integrals on grids.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(p, grid=False, fixture=False):
        p.add_argument("--alpha", help="comma-separated orders alpha_i")
        p.add_argument("--config", help="JSON file with defaults for any option")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--ell", type=int, help="half difference order (default: smallest valid)")
        if grid:
            p.add_argument("--L", type=float, help="box half-width")
            p.add_argument("--N", type=int, help="points per axis")
        if fixture:
            p.add_argument("--fixture", choices=sorted(FIXTURES))
            p.add_argument("--width", type=float, help="fixture scale parameter")

    p = sub.add_parser("profile", help="derived exponents and admissibility")
    common(p)
    p.set_defaults(run=cmd_profile)

    p = sub.add_parser("rho", help="anisotropic distance of points")
    common(p)
    p.add_argument("--point", action="append", help="comma-separated point (repeatable)")
    p.set_defaults(run=cmd_rho)

    h = sub.add_parser("hsi", help="hypersingular operator and symbol").add_subparsers(
        dest="action", required=True, parser_class=Parser)
    p = h.add_parser("apply", help="T_eps f at points")
    common(p, fixture=True)
    p.add_argument("--point", action="append")
    p.add_argument("--eps", help="comma-separated truncation radii")
    p.set_defaults(run=cmd_hsi_apply)
    p = h.add_parser("symbol", help="S_eps on a dual grid")
    common(p, grid=True)
    p.add_argument("--eps")
    p.set_defaults(run=cmd_hsi_symbol)
    p = h.add_parser("converge", help="T_eps f(x) as eps -> 0")
    common(p, fixture=True)
    p.add_argument("--point", action="append")
    p.add_argument("--eps0", type=float)
    p.add_argument("--count", type=int)
    p.set_defaults(run=cmd_hsi_converge)

    s = sub.add_parser("spectral", help="Fourier multipliers").add_subparsers(
        dest="action", required=True, parser_class=Parser)
    p = s.add_parser("apply", help="apply a multiplier table to a fixture")
    common(p, grid=True, fixture=True)
    p.add_argument("--symbol", choices=["liouville", "rho-power"])
    p.add_argument("--power", type=float, help="exponent for rho-power")
    p.set_defaults(run=cmd_spectral_apply)

    s = sub.add_parser("potential", help="potential-kernel inversion").add_subparsers(
        dest="action", required=True, parser_class=Parser)
    p = s.add_parser("invert", help="residual of Q * (T f) - f per grid")
    common(p, fixture=True)
    p.add_argument("--sizes", help="comma-separated L:N pairs")
    p.set_defaults(run=cmd_potential_invert)

    s = sub.add_parser("approx", help="smooth compactly supported approximation").add_subparsers(
        dest="action", required=True, parser_class=Parser)
    p = s.add_parser("study", help="error table over (delta, N)")
    common(p, grid=True, fixture=True)
    p.add_argument("--p", help="comma-separated outer exponents")
    p.add_argument("--r", help="comma-separated inner exponents")
    p.add_argument("--schedule", help="JSON file with 'deltas' and 'radii'")
    p.set_defaults(run=cmd_approx_study, cmd_defaults={"L": 16.0, "N": 128})

    p = sub.add_parser("check", help="run a probe suite")
    common(p)
    p.add_argument("--suite", choices=["lemmas"])
    p.set_defaults(run=cmd_check)
    return top


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        return args.run(args, cfg)
    except (InputError, UnsupportedBranchError) as exc:
        print(f"anihsi: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"anihsi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AnihsiError as exc:
        print(f"anihsi: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
