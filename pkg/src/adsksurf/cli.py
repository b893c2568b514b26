"""Command line front end.

    adsksurf barrier   --theta T [--t-min --t-max --s-min --s-max --n | --grid-h] [--out DIR]
    adsksurf verify    [--theta T --grid-h H --seed S --tol NAME=VAL ...] [--out report.json]
    adsksurf curvature FILE --mode lie|affine [--out curvature.csv]
    adsksurf qsnorm    --map identity|moebius|piecewise [--params a,b,c,d | --table FILE]

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 numerical failure.
Human diagnostics go to stderr; ``--json`` puts a machine-readable summary on stdout.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import formats
from .barrier_family import barrier_surface, chart_frame, chart_graph, tabulate_profile, to_chart
from .formats import FormatError
from .landslide_tensors import PiecewiseMobius, mobius_map, qs_norm_estimate
from .representation_formula import FRAME_TOL, TRACE_FLAG_TOL
from .surface_calculus import COND_MAX, E_CHART, OK, extrinsic, graph_curvature, interior

log = logging.getLogger("adsksurf")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
HOOKS_ENV = "ADSKSURF_TEST_HOOKS"
CHART_HALF = 0.45


class UsageError(Exception):
    pass


class NumericalError(Exception):
    pass


def setup_logging():
    level = os.environ.get("ADSKSURF_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        level = "error"
    logging.basicConfig(level=levels[level], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def say(msg):
    print(msg, file=sys.stderr)


def emit_json(args, obj):
    if args.json:
        sys.stdout.write(formats.dumps(obj))


# ------------------------------------------------------------ validation

def check_theta(theta):
    if theta is None or not (0.0 < theta < math.pi):
        raise UsageError("--theta must lie in (0, pi)")
    return theta


def check_window(a, b, name, lo=-math.inf, hi=math.inf):
    if not (lo < a < b < hi):
        raise UsageError(f"invalid {name} range [{a}, {b}]")


def axis(a, b, n, h):
    if h is not None:
        if h <= 0:
            raise UsageError("--grid-h must be positive")
        n = int(round((b - a) / h)) + 1
    if n < 8:
        raise UsageError("resolutions must be at least 8")
    return np.linspace(a, b, n)


def parse_tols(items):
    """``--tol 1e-9`` sets every algebraic tolerance; ``--tol name=value`` one suite."""
    from .suites import TOLERANCES
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        try:
            v = float(val if sep else name)
        except ValueError:
            raise UsageError(f"bad --tol {item!r}") from None
        if not v > 0 and name != "nesting":
            raise UsageError("tolerances must be positive")
        if sep:
            if name not in TOLERANCES:
                raise UsageError(f"unknown tolerance {name!r}")
            out[name] = v
        else:
            for k, t0 in TOLERANCES.items():
                if t0 == 1e-10:
                    out[k] = v
    return out


# ------------------------------------------------------------ commands

def cmd_barrier(args):
    th = check_theta(args.theta)
    check_window(args.t_min, args.t_max, "t", -0.5 * math.pi, 0.0)
    check_window(args.s_min, args.s_max, "s")
    s = axis(args.s_min, args.s_max, args.n, args.grid_h)
    t = axis(args.t_min, args.t_max, args.n, args.grid_h)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        inp, rep = barrier_surface(th, s, t)
        prof = tabulate_profile(th, t=t)
        ext = extrinsic(rep.patch, use_normals=False, strict=False)
        with np.errstate(invalid="ignore"):
            detB = interior(np.linalg.det(ext.B))
        aff = to_chart(rep.sigma, chart_frame())
        graph = None
        if args.chart_h > 0:
            x = np.linspace(-CHART_HALF, CHART_HALF, int(round(2 * CHART_HALF / args.chart_h)) + 1)
            graph, _ = chart_graph(th, x, x, (args.s_min, args.s_max), (args.t_min, args.t_max))
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise NumericalError(str(exc)) from exc
    meta = {"theta": th, "frame_tol": FRAME_TOL, "trace_flag_tol": TRACE_FLAG_TOL,
            "ns": s.size, "nt": t.size, "chart_center": "0,-0.75"}
    prof.to_json(out / "profile.json")
    formats.write_patch(out / "patch.csv", rep.patch, meta)
    formats.write_csv(out / "affine.csv", formats.AFFINE_COLUMNS, aff.reshape(-1, 3), meta)
    files = ["profile.json", "patch.csv", "affine.csv"]
    if graph is not None:
        formats.write_chart(out / "graph.csv", graph, dict(meta, chart_h=args.chart_h))
        files.append("graph.csv")
    mean = float(np.nanmean(detB))
    target = math.tan(0.5 * th) ** 2
    say(f"barrier theta={th:.10g}: {s.size}x{t.size} nodes, det B mean = {mean:.6f} "
        f"(tan^2(theta/2) = {target:.6f}), files in {out}")
    emit_json(args, {"theta": th, "det_b_mean": mean, "det_b_target": target,
                     "flagged_nodes": rep.diagnostics["flagged_nodes"],
                     "files": files})
    return EXIT_OK


def cmd_verify(args):
    from .suites import FAULTS, VerifyConfig, run_all
    th = check_theta(args.theta)
    if args.grid_h is not None and args.grid_h <= 0:
        raise UsageError("--grid-h must be positive")
    check_window(args.t_min, args.t_max, "t", -0.5 * math.pi, 0.0)
    check_window(args.s_min, args.s_max, "s")
    if args.inject_fault is not None:
        if os.environ.get(HOOKS_ENV) != "1":
            raise UsageError(f"fault injection needs {HOOKS_ENV}=1")
        if args.inject_fault not in FAULTS:
            raise UsageError(f"unknown fault {args.inject_fault!r}")
    cfg = VerifyConfig(theta=th, grid_h=args.grid_h or 5e-3,
                       s_window=(args.s_min, args.s_max), t_window=(args.t_min, args.t_max),
                       seed=args.seed, tol=parse_tols(args.tol), fault=args.inject_fault)
    suites = run_all(cfg, only=args.suite)
    ok = all(r["pass"] for r in suites.values())
    report = {"config": {"theta": cfg.theta, "grid_h": cfg.grid_h, "seed": cfg.seed,
                         "s_window": list(cfg.s_window), "t_window": list(cfg.t_window),
                         "fault": cfg.fault},
              "pass": ok, "suites": suites}
    if args.out:
        formats.write_json(args.out, report)
    for name, r in suites.items():
        say(f"{'PASS' if r['pass'] else 'FAIL'} {name:16s} {r['max_residual']:.3e} "
            f"(tol {r['tolerance']:.1e})")
    if "convergence" in suites:
        say(f"first-ff residual ratio h vs h/2: {suites['convergence']['ratio']:.3f}")
    emit_json(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_curvature(args):
    tol = parse_single_tol(args.tol, 1e-6)
    try:
        if args.mode == "lie":
            meta, patch = formats.read_patch(args.input)
            ext = extrinsic(patch, use_normals=False, strict=False)
            K, codes = ext.K, ext.flags
            a, b = patch.u, patch.v
        else:
            meta, cf = formats.read_chart(args.input)
            _, K, codes = graph_curvature(cf, chart_tol=tol, space_tol=tol)
            a, b = cf.x, cf.y
    except FormatError as exc:
        raise UsageError(str(exc)) from exc
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise NumericalError(str(exc)) from exc
    A, Bm = np.meshgrid(a, b, indexing="ij")
    codes = np.where(np.isfinite(K) | (codes != OK), codes, E_CHART)
    rows = [(x, y, k, c or "OK") for x, y, k, c in zip(A.ravel(), Bm.ravel(), K.ravel(), codes.ravel())]
    head = {"mode": args.mode, "source": Path(args.input).name}
    if args.mode == "affine":
        head["tol"] = tol
    else:
        head["cond_max"] = COND_MAX
    formats.write_csv(args.out, ("u", "v", "K", "code"), rows, head)
    good = np.isfinite(K) & (codes == OK)
    core = interior(good) if min(good.shape) > 2 else good
    Kc = interior(K) if min(good.shape) > 2 else K
    mean = float(np.mean(Kc[core])) if np.any(core) else math.nan
    flagged = int((codes != OK).sum())
    say(f"curvature ({args.mode}): {K.size} nodes, {flagged} flagged, interior K mean = {mean:.8f}")
    emit_json(args, {"mode": args.mode, "nodes": int(K.size), "flagged": flagged, "K_mean": mean,
                     "out": args.out})
    return EXIT_OK


def parse_single_tol(items, default):
    if not items:
        return default
    try:
        v = float(items[-1])
    except ValueError:
        raise UsageError(f"bad --tol {items[-1]!r}") from None
    if not v > 0:
        raise UsageError("tolerances must be positive")
    return v


def read_piecewise(path):
    meta, cols, tab = formats.read_csv(path)
    if tuple(cols) != ("break", "a", "b", "c", "d"):
        raise FormatError(f"{path}: expected columns break,a,b,c,d")
    mats = np.stack([tab[c] for c in "abcd"], -1).reshape(-1, 2, 2)
    return PiecewiseMobius(tab["break"], mats)


def cmd_qsnorm(args):
    n = args.n
    if n < 1:
        raise UsageError("--n must be positive")
    try:
        if args.map == "identity":
            f = mobius_map(np.eye(2))
        elif args.map == "moebius":
            if not args.params:
                raise UsageError("moebius map needs --params a,b,c,d")
            p = [float(v) for v in args.params.split(",")]
            if len(p) != 4:
                raise UsageError("--params takes four numbers")
            if p[0] * p[3] - p[1] * p[2] <= 0:
                raise UsageError("degenerate Moebius parameters (need ad - bc > 0)")
            f = mobius_map(np.array(p).reshape(2, 2))
        else:
            if not args.table:
                raise UsageError("piecewise map needs --table FILE")
            f = read_piecewise(args.table)
    except (FormatError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        est = qs_norm_estimate(f, n)
    except ValueError as exc:
        raise NumericalError(str(exc)) from exc
    say(f"qs norm estimate over {n} symmetric quadruples: {est:.16e}")
    if args.json:
        emit_json(args, {"map": args.map, "samples": n, "estimate": est})
    else:
        print(formats.fmt(est))
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser():
    p = argparse.ArgumentParser(prog="adsksurf", description="K-surfaces in AdS3 from landslides")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable summary on stdout")
        sp.add_argument("--tol", action="append", help="tolerance override (repeatable)")

    def window(sp, t=(-1.4, -0.1), s=(-1.0, 1.0)):
        sp.add_argument("--t-min", type=float, default=t[0])
        sp.add_argument("--t-max", type=float, default=t[1])
        sp.add_argument("--s-min", type=float, default=s[0])
        sp.add_argument("--s-max", type=float, default=s[1])

    b = sub.add_parser("barrier", help="tabulate a barrier profile and export its surface")
    b.add_argument("--theta", type=float, required=True)
    window(b)
    b.add_argument("--n", type=int, default=64, help="nodes per axis")
    b.add_argument("--grid-h", type=float, help="grid spacing (overrides --n)")
    b.add_argument("--chart-h", type=float, default=1e-2,
                   help="spacing of graph.csv on the chart square (0 disables)")
    b.add_argument("--out", default=".", help="output directory")
    common(b)
    b.set_defaults(func=cmd_barrier)

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--theta", type=float, default=0.5 * math.pi)
    window(v, t=(-0.88, -0.72), s=(-0.25, 0.25))
    v.add_argument("--grid-h", type=float, default=5e-3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--inject-fault", help=argparse.SUPPRESS)
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curvature", help="per-node curvature of a patch.csv or chart CSV")
    c.add_argument("input")
    c.add_argument("--mode", choices=("lie", "affine"), required=True)
    c.add_argument("--out", default="curvature.csv")
    common(c)
    c.set_defaults(func=cmd_curvature)

    q = sub.add_parser("qsnorm", help="quasisymmetric norm estimate of a boundary map")
    q.add_argument("--map", choices=("identity", "moebius", "piecewise"), default="identity")
    q.add_argument("--params", help="a,b,c,d for --map moebius")
    q.add_argument("--table", help="CSV break,a,b,c,d for --map piecewise")
    q.add_argument("--n", type=int, default=512, help="number of sampled quadruples")
    common(q)
    q.set_defaults(func=cmd_qsnorm)
    return p


def main(argv=None):
    setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        say(f"error: {exc}")
        return EXIT_USAGE
    except NumericalError as exc:
        say(f"numerical failure: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
