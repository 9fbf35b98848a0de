"""Command line interface: ``qtraj simulate|nodes|barrier|figure|check``.

Exit codes: 0 success, 1 check failure, 2 invalid input, 3 run ended by an
event (divergence, stall, leaving the representable domain).
"""

import argparse
import csv
import io
import json
import math
import os
import sys

from .. import constants
from .._jit import backend
from ..basis import build_basis
from ..checks import run_suite
from ..dynamics import integrate_trajectory
from ..tunneling import (BarrierSpec, dwell_time, dwell_time_derivative, floyd_dwell_time,
                         floyd_dwell_time_derivative, monotonicity_report, thick_limit,
                         thin_limit)
from .config import ConfigError, load_config, resolve
from .presets import build_figure
from .svg import Chart, Series, render

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_EVENT = 3

CSV_HEADER = ["t_fs", "x_angstrom", "v_angstrom_per_fs", "branch"]

# flag name -> RunConfig field
_RUN_FLAGS = [
    ("--potential", "potential", str),
    ("--energy-ev", "energy_ev", float),
    ("--v0-ev", "v0_ev", float),
    ("--g-ev-per-angstrom", "g_ev_per_angstrom", float),
    ("--omega", "omega", float),
    ("--a", "a", float),
    ("--b", "b", float),
    ("--l", "l", float),
    ("--x0-angstrom", "x0_angstrom", float),
    ("--t0-fs", "t0_fs", float),
    ("--t-end-fs", "t_end_fs", float),
    ("--sign", "sign", str),
    ("--hbar-scale", "hbar_scale", float),
    ("--epsilon-turn", "epsilon_turn", float),
    ("--v-max", "v_max", float),
    ("--rtol", "rtol", float),
    ("--atol", "atol", float),
    ("--constants-form", "constants_form", str),
    ("--samples", "samples", int),
]


def _add_run_flags(p):
    p.add_argument("--config", help="JSON run configuration; flags override its fields")
    for flag, dest, typ in _RUN_FLAGS:
        p.add_argument(flag, dest=dest, type=typ, default=None)
    p.add_argument("--enter-barrier", dest="enter_barrier", action="store_true", default=None)
    _add_output_flags(p)


def _add_output_flags(p, default_formats="csv,json"):
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", dest="formats", default=None,
                   help=f"comma-separated subset of csv,json,svg (default {default_formats})")


def _formats(args, default):
    raw = args.formats if args.formats is not None else default
    if isinstance(raw, list):
        return raw
    return [f.strip() for f in raw.split(",") if f.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="qtraj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory")
    _add_run_flags(p)

    p = sub.add_parser("nodes", help="node table n,t_fs,x_angstrom,kind of one trajectory")
    _add_run_flags(p)

    p = sub.add_parser("barrier", help="traversal time through a rectangular barrier")
    p.add_argument("--v0-ev", type=float, required=True)
    p.add_argument("--e-ev", type=float, required=True)
    p.add_argument("--q-angstrom", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--method", choices=("bd", "floyd"), default="bd")
    p.add_argument("--points", type=int, default=21)
    _add_output_flags(p, default_formats="none")

    p = sub.add_parser("figure", help="render a built-in figure preset as SVG")
    p.add_argument("--id", dest="fig_id", type=int, required=True, choices=range(1, 7))
    p.add_argument("--samples", type=int, default=1500)
    _add_output_flags(p, default_formats="svg")

    p = sub.add_parser("check", help="run the self-consistency suite")
    p.add_argument("--epsilon-turn", type=float, default=None)
    return parser


def _overrides(args):
    out = {dest: getattr(args, dest) for _, dest, _ in _RUN_FLAGS}
    out["enter_barrier"] = args.enter_barrier
    if args.formats is not None:
        out["outputs"] = _formats(args, "")
    return out


def _fmt(v):
    return repr(float(v))


def trajectory_csv(t, x, v, br) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in zip(t, x, v, br):
        w.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]), str(int(row[3]))])
    return buf.getvalue()


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _sidecar(run, traj, pair):
    ms = traj.microstate
    opts = run.options
    return {
        "config": run.config.to_dict(),
        "status": traj.status,
        "backend": backend(),
        "x_start_angstrom": traj.x_start,
        "t_end_fs": traj.t_end,
        "microstate": {"a": ms.a, "b": ms.b, "l": ms.l, "branch": ms.branch,
                       "note": "normalized so that a*W > 0"},
        "wronskian_x": pair.W_x,
        "turning_points_angstrom": list(run.scenario.turning_points()),
        "events": [{"t_fs": e.t, "x_angstrom": e.x, "kind": e.kind} for e in traj.events],
        "tolerances": {"rtol": opts.rtol, "atol": opts.atol,
                       "epsilon_turn": opts.epsilon_turn,
                       "v_max": opts.v_max, "enter_barrier": opts.enter_barrier},
        "constants": dict(constants.as_dict(), hbar_scale=run.scenario.hbar_scale,
                          hbar_used_eV_fs=run.scenario.hbar),
        "units": {"t": "fs", "x": "angstrom", "v": "angstrom/fs", "energy": "eV"},
    }


def _run(args):
    cfg = load_config(args.config, _overrides(args))
    run = resolve(cfg)
    pair = build_basis(run.scenario)
    try:
        traj = integrate_trajectory(run.scenario, pair, run.microstate, run.x0,
                                    cfg.t0_fs, cfg.t_end_fs, run.options)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return run, pair, traj


def cmd_simulate(args):
    run, pair, traj = _run(args)
    os.makedirs(args.out, exist_ok=True)
    fmts = run.config.outputs
    t, x, v, br = traj.state_samples(pair, int(run.config.samples))
    if "csv" in fmts:
        _write(os.path.join(args.out, "trajectory.csv"), trajectory_csv(t, x, v, br))
    if "json" in fmts:
        _write(os.path.join(args.out, "trajectory.json"),
               json.dumps(_sidecar(run, traj, pair), indent=2) + "\n")
    if "svg" in fmts:
        ch = Chart(f"{run.config.potential}, E = {run.scenario.energy:g} eV",
                   "t (fs)", "x (angstrom)")
        ch.series.append(Series(f"a={run.config.a:g}, b={run.config.b:g}", t, x))
        ch.markers = [(e.t, e.x) for e in traj.events if e.kind in ("node", "branch_flip")]
        _write(os.path.join(args.out, "trajectory.svg"), render(ch))
    print(f"status={traj.status} points={len(t)} events={len(traj.events)}")
    return EXIT_OK if traj.status == "completed" else EXIT_EVENT


def cmd_nodes(args):
    run, pair, traj = _run(args)
    lines = ["n,t_fs,x_angstrom,kind"]
    n = 0
    for e in traj.events:
        if e.kind not in ("node", "branch_flip"):
            continue
        kind = "phi2_zero" if e.kind == "node" else "turning_point"
        lines.append(f"{n},{_fmt(e.t)},{_fmt(e.x)},{kind}")
        n += 1
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.formats is not None and "csv" in _formats(args, ""):
        os.makedirs(args.out, exist_ok=True)
        _write(os.path.join(args.out, "nodes.csv"), text)
    return EXIT_OK if traj.status == "completed" else EXIT_EVENT


def cmd_barrier(args):
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    try:
        spec = BarrierSpec(V0=args.v0_ev, q=args.q_angstrom, E=args.e_ev, a=args.a, b=args.b)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    import numpy as np

    xs = np.linspace(0.0, spec.q, args.points)
    if args.method == "bd":
        fn, der = dwell_time, dwell_time_derivative
    else:
        fn, der = floyd_dwell_time, floyd_dwell_time_derivative
    ts = fn(spec, xs)
    rep = monotonicity_report(lambda x: fn(spec, x), (0.0, spec.q), lambda x: der(spec, x))
    lines = ["x_angstrom,T_fs"]
    lines += [f"{_fmt(x)},{_fmt(t)}" for x, t in zip(xs, ts)]
    lines.append(f"# method={args.method} rho_q={spec.rho * spec.q!r}")
    lines.append(f"# thin_limit_fs={_fmt(thin_limit(spec))}")
    lines.append(f"# thick_limit_fs={_fmt(thick_limit(spec))}")
    ext = "none" if rep.extremum_x is None else _fmt(rep.extremum_x)
    lines.append(f"# monotone={str(rep.monotone).lower()} extremum_x_angstrom={ext}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    fmts = _formats(args, "none")
    if "csv" in fmts:
        os.makedirs(args.out, exist_ok=True)
        _write(os.path.join(args.out, f"barrier_{args.method}.csv"), text)
    return EXIT_OK


def cmd_figure(args):
    data = build_figure(args.fig_id, samples=args.samples)
    os.makedirs(args.out, exist_ok=True)
    fmts = _formats(args, "svg")
    if "svg" in fmts:
        _write(os.path.join(args.out, f"figure{args.fig_id}.svg"), render(data.chart))
    if "json" in fmts:
        doc = {"figure": args.fig_id,
               "curves": [{"label": c.label, "status": tr.status,
                           "microstate": vars(tr.microstate),
                           "events": [{"t_fs": e.t, "x_angstrom": e.x, "kind": e.kind}
                                      for e in tr.events]}
                          for c, tr in zip(data.preset.curves, data.trajectories)],
               "constants": constants.as_dict()}
        _write(os.path.join(args.out, f"figure{args.fig_id}.json"),
               json.dumps(doc, indent=2) + "\n")
    if "csv" in fmts:
        pair = build_basis(data.preset.scenario)
        for i, tr in enumerate(data.trajectories):
            t, x, v, br = tr.state_samples(pair, args.samples)
            _write(os.path.join(args.out, f"figure{args.fig_id}_curve{i + 1}.csv"),
                   trajectory_csv(t, x, v, br))
    print(f"figure {args.fig_id}: " + ", ".join(
        f"{c.label} [{tr.status}]" for c, tr in zip(data.preset.curves, data.trajectories)))
    return EXIT_OK


def cmd_check(args):
    if args.epsilon_turn is not None and not args.epsilon_turn > 0:
        raise ConfigError("--epsilon-turn must be positive")
    results = run_suite(args.epsilon_turn)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  result  {'worst':>11}  {'tolerance':>9}  seconds")
    for r in results:
        val = "inf" if math.isinf(r.value) else f"{r.value:.3e}"
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {val:>11}  "
              f"{r.tolerance:>9.1e}  {r.seconds:7.2f}")
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {"simulate": cmd_simulate, "nodes": cmd_nodes, "barrier": cmd_barrier,
            "figure": cmd_figure, "check": cmd_check}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
