"""Command-line interface.

    kg1d solve --potential v1 --s 2 --parity even --nodes 0 --e-lo 0 --e-hi 1
    kg1d solve-cutoff --potential v1 --E 0.5 --parity even --nodes 0
    kg1d trace --potential v2 --mode energy --out fig3.csv
    kg1d special --potential v1
    kg1d balmer --potential v1 --ma 1e-5 --ma 1e-4 --n-max 2
    kg1d oracle --potential v1 --a 0.05 --parity even --n-grid 2000 --x-max 200
    kg1d dump-shot --potential v1 --a 0.05 --E 0.99 --parity even --out shot.csv

Exit status: 0 on success, 1 when a solver fails (no eigenvalue in the
window, iteration cap), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction

import numpy as np

from kg1d import balmer, curve, oracle
from kg1d.eigensolver import A_MAX, A_MIN, A_TOL_REL, E_TOL_REL, SearchWindow, solve_cutoff, solve_energy
from kg1d.errors import DomainError, SolverError
from kg1d.integrator import MeshPolicy, trajectory
from kg1d.output import POINT_COLUMNS, RunManifest, csv_text, point_rows, write_with_manifest
from kg1d.params import DEFAULT_ALPHA, DEFAULT_MASS, ModelParams, a_from_s, s_from_a
from kg1d.potentials import PotentialSpec

log = logging.getLogger("kg1d")

# published values, used only to print reference columns
PUBLISHED = {
    "v1": {"s0": 0.99906868, "s_min": 0.99136, "s_inf": 6.1711, "ma_min": 5.28217e-5},
    "v2": {"s0": 1.9982289, "s_min": 1.98216, "s_inf": 11.9777, "ma_min": 1.05614e-4},
}


class UsageError(Exception):
    pass


def _number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=_number, default=DEFAULT_ALPHA,
                   help="coupling constant (default 1/137; fractions accepted)")
    p.add_argument("--mass", type=_number, default=DEFAULT_MASS, help="mass m (default 1)")
    p.add_argument("--growth", type=float, default=1.01, help="mesh step growth factor")
    p.add_argument("--h0", type=float, default=None, help="first mesh step (default: automatic)")
    p.add_argument("--x-max-factor", type=float, default=30.0,
                   help="integrate to x_max = factor / kappa")
    p.add_argument("--x-max-cap", type=float, default=None,
                   help="absolute cap on x_max (default 1e6/m)")
    p.add_argument("--manifest-only", action="store_true",
                   help="print the run manifest and exit without computing")


def _potential(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", choices=("v1", "v2"), default="v1")


def _cutoff_arg(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--a", type=float, help="cutoff radius")
    g.add_argument("--s", type=float, help="scaled cutoff s = m a / delta")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kg1d", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="energy search at fixed cutoff")
    _potential(p)
    _cutoff_arg(p)
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--nodes", type=int, default=0)
    p.add_argument("--e-lo", type=float, default=0.0, help="window start, in units of m")
    p.add_argument("--e-hi", type=float, default=1.0, help="window end, in units of m")
    p.add_argument("--tol", type=float, default=E_TOL_REL)
    p.add_argument("--regime", choices=("E_positive", "E_negative"), default=None,
                   help="node rule override (needed when the window straddles 0)")
    p.add_argument("--dump-shot", metavar="PATH", help="write (x, psi, dpsi) at the solution")
    p.add_argument("--out", help="write CSV here instead of stdout")
    _common(p)

    p = sub.add_parser("solve-cutoff", help="cutoff search at fixed energy")
    _potential(p)
    p.add_argument("--E", type=float, required=True, help="energy, in units of m")
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--nodes", type=int, default=0)
    p.add_argument("--a-lo", type=float, default=A_MIN)
    p.add_argument("--a-hi", type=float, default=A_MAX)
    p.add_argument("--tol", type=float, default=A_TOL_REL)
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("trace", help="trace the anomalous-state beta(s) curve")
    _potential(p)
    p.add_argument("--mode", choices=("energy", "cutoff"), default="energy")
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--beta-max", type=float, default=1e3, help="energy mode grid upper end")
    p.add_argument("--beta-min", type=float, default=None, help="energy mode grid lower end")
    p.add_argument("--s-max", type=float, default=100.0, help="cutoff mode: largest s")
    _common(p)

    p = sub.add_parser("special", help="s0, s_min, s_inf for a potential family")
    _potential(p)
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("balmer", help="compare doublets with the closed form")
    p.add_argument("--potential", choices=("v1",), default="v1")
    p.add_argument("--ma", type=float, action="append", help="m a value (repeatable)")
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("oracle", help="finite-difference spectrum")
    _potential(p)
    _cutoff_arg(p)
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--n-grid", type=int, default=2000)
    p.add_argument("--x-max", type=float, default=200.0)
    p.add_argument("--richardson", action="store_true",
                   help="also solve with n_grid/2 and extrapolate")
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("dump-shot", help="write one shot's trajectory")
    _potential(p)
    _cutoff_arg(p)
    p.add_argument("--E", type=float, required=True, help="energy, in units of m")
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--out", required=True)
    _common(p)
    return parser


def _params(args) -> ModelParams:
    return ModelParams(alpha=args.alpha, m=args.mass)


def _policy(args) -> MeshPolicy:
    return MeshPolicy(h0=args.h0, growth=args.growth, x_max_factor=args.x_max_factor,
                      x_max_cap=args.x_max_cap)


def _cutoff(args, params) -> float:
    if args.a is not None:
        return args.a
    return a_from_s(args.s, params)


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("manifest_only",)}


def _emit(args, body: str, manifest: RunManifest, out=None) -> None:
    out = out if out is not None else getattr(args, "out", None)
    if out:
        write_with_manifest(out, body, manifest)
    else:
        sys.stdout.write(body)


def cmd_solve(args, params, policy, manifest):
    m = params.m
    spec = PotentialSpec(args.potential, _cutoff(args, params), params.alpha)
    window = SearchWindow(args.e_lo * m, args.e_hi * m, args.tol)
    pt = solve_energy(params, spec, args.parity, args.nodes, window, policy, regime=args.regime)
    if args.dump_shot:
        _dump(params, spec, pt.E, args.parity, policy, args.dump_shot, manifest)
    _emit(args, csv_text(POINT_COLUMNS, point_rows([pt])), manifest)


def cmd_solve_cutoff(args, params, policy, manifest):
    m = params.m
    window = SearchWindow(args.a_lo / m, args.a_hi / m, args.tol)
    pt = solve_cutoff(params, args.potential, args.E * m, args.parity, args.nodes, window, policy)
    _emit(args, csv_text(POINT_COLUMNS, point_rows([pt])), manifest)


def cmd_trace(args, params, policy, manifest):
    sp = curve.special_points(params, args.potential, policy)
    manifest.extra["special"] = {"s0": sp.s0, "s_min": sp.s_min, "E_at_min": sp.E_at_min,
                                 "s_inf": sp.s_inf}
    if args.mode == "energy":
        grid = curve.default_energy_grid(params, args.points, args.beta_max, args.beta_min)
        c = curve.trace_by_energy(params, args.potential, grid, policy, special=sp)
        points = c.points
    else:
        n_up = args.points // 2
        n_lo = args.points - n_up
        s_up = np.geomspace(sp.s_min * (1 + 1e-4), args.s_max, n_up)
        s_lo = np.geomspace(sp.s_min * (1 + 1e-4), sp.s_inf * (1 - 1e-4), n_lo)
        up = curve.trace_by_cutoff(params, args.potential, [a_from_s(s, params) for s in s_up],
                                   "upper", policy, e_split=sp.E_at_min)
        lo = curve.trace_by_cutoff(params, args.potential, [a_from_s(s, params) for s in s_lo],
                                   "lower", policy, e_split=sp.E_at_min)
        points = sorted(up.points + lo.points, key=lambda p: -p.E)
        manifest.extra["missing_a"] = up.missing + lo.missing
    _emit(args, csv_text(POINT_COLUMNS, point_rows(points)), manifest)


def cmd_special(args, params, policy, manifest):
    sp = curve.special_points(params, args.potential, policy)
    ref = PUBLISHED.get(args.potential, {})
    rows = [
        ("s0", sp.s0, ref.get("s0", math.nan)),
        ("s_min", sp.s_min, ref.get("s_min", math.nan)),
        ("s_inf", sp.s_inf, ref.get("s_inf", math.nan)),
        ("ma_min", params.m * sp.a_min, ref.get("ma_min", math.nan)),
        ("a0", sp.a0, math.nan),
        ("a_inf", sp.a_inf, math.nan),
        ("E_at_min", sp.E_at_min, math.nan),
        ("s_inf_extrapolated", sp.s_inf_extrapolated, math.nan),
    ]
    body = csv_text(("quantity", "value", "published"), rows)
    body += (f"# tolerances: a-search tol_rel={A_TOL_REL:g}, golden E tol={curve.GOLDEN_E_TOL:g} m, "
             f"s_inf agreement={curve.S_INF_AGREEMENT:g}\n")
    if sp.s_inf_disagreement:
        body += "# WARNING: threshold and extrapolated s_inf disagree\n"
    _emit(args, body, manifest)


def cmd_balmer(args, params, policy, manifest):
    ma_values = args.ma or [1e-5, 1e-4]
    recs = balmer.doublet_table(params, args.potential, ma_values, args.n_max, policy)
    cols = ("n", "ma", "E_formula_odd", "E_numeric_odd", "rel_dev_odd",
            "E_formula_even", "E_numeric_even", "rel_dev_even", "epsilon_odd", "epsilon_even")
    rows = [(r.n, params.m * r.a, r.E_formula_odd, r.E_numeric_odd, r.binding_deviation("odd"),
             r.E_formula_even, r.E_numeric_even, r.binding_deviation("even"),
             r.epsilon_odd, r.epsilon_even) for r in recs]
    _emit(args, csv_text(cols, rows), manifest)


def cmd_oracle(args, params, policy, manifest):
    spec = PotentialSpec(args.potential, _cutoff(args, params), params.alpha)
    cfg = oracle.OracleConfig(x_max=args.x_max, n_grid=args.n_grid, parity=args.parity)
    if args.richardson:
        est = oracle.richardson(params, spec, cfg)
        rows = [(e.E, e.error, e.nodes, e.parity) for e in est]
        body = csv_text(("E", "error", "nodes", "parity"), rows)
    else:
        spec_out = oracle.oracle_spectrum(params, spec, cfg)
        body = csv_text(("E", "nodes", "parity"), [(e.E, e.nodes, e.parity) for e in spec_out.eigen])
    _emit(args, body, manifest)


def _dump(params, spec, E, parity, policy, path, manifest):
    x, psi, dpsi = trajectory(params, spec, E, parity, policy)
    write_with_manifest(path, csv_text(("x", "psi", "dpsi"), zip(x, psi, dpsi)), manifest)


def cmd_dump_shot(args, params, policy, manifest):
    spec = PotentialSpec(args.potential, _cutoff(args, params), params.alpha)
    _dump(params, spec, args.E * params.m, args.parity, policy, args.out, manifest)


COMMANDS = {
    "solve": cmd_solve,
    "solve-cutoff": cmd_solve_cutoff,
    "trace": cmd_trace,
    "special": cmd_special,
    "balmer": cmd_balmer,
    "oracle": cmd_oracle,
    "dump-shot": cmd_dump_shot,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        params = _params(args)
        policy = _policy(args)
        manifest = RunManifest(
            command=args.command, flags=_flags(args),
            tolerances={"E_tol_rel": E_TOL_REL, "a_tol_rel": A_TOL_REL,
                        "golden_E_tol": curve.GOLDEN_E_TOL},
            mesh_policy=policy.as_dict())
        if args.manifest_only:
            manifest.stop()
            sys.stdout.write(manifest.header())
            return 0
        COMMANDS[args.command](args, params, policy, manifest)
    except DomainError as exc:
        print(f"kg1d: usage error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        ctx = getattr(exc, "context", None)
        extra = f" {json.dumps(ctx, default=str)}" if ctx else ""
        print(f"kg1d: solver failure: {exc}{extra}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
