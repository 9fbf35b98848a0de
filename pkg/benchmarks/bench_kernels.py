"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter (the choice is fixed at import time
by ``QTRAJ_DISABLE_JIT``). Timings exclude the first call, so compilation is
not counted; it is reported separately as ``warmup``.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from qtraj import backend
from qtraj.basis import Constant, HarmonicExcited1, Linear, Scenario, build_basis
from qtraj.constants import force_si_to_internal
from qtraj.dynamics import Microstate, integrate_trajectory, velocity_field
from qtraj.specfun import airy_pair, dawson

repeat = int(sys.argv[1])
lin = Scenario(Linear(force_si_to_internal(1e-9)), 10.0)
lin_pair = build_basis(lin)
exc = Scenario(HarmonicExcited1(), 30.0)
exc_pair = build_basis(exc)
free = Scenario(Constant(0.0), 10.0)
free_pair = build_basis(free)
y = np.linspace(-40, 12, 20000)
u = np.linspace(-30, 30, 20000)
xs = np.linspace(-20, 15, 20000)

work = {
    "airy_20k": lambda: airy_pair(y),
    "dawson_20k": lambda: dawson(u),
    "velocity_linear_20k": lambda: velocity_field(xs, lin, lin_pair, Microstate(0.5, 1.0)),
    "trajectory_free": lambda: integrate_trajectory(free, free_pair, Microstate(0.1, 0.0),
                                                    0.0, 0.0, 1.0),
    "trajectory_excited": lambda: integrate_trajectory(
        exc, exc_pair, Microstate(0.8, 1.0), -exc.turning_points()[1] * 0.999, 0.0, 1.0),
}
res = {"backend": backend(), "timings": {}}
for name, fn in work.items():
    t0 = time.perf_counter()
    fn()
    warm = time.perf_counter() - t0
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    res["timings"][name] = {"warmup": warm, "best": best}
print(json.dumps(res))
"""


def run_backend(disable, repeat):
    env = dict(os.environ, QTRAJ_DISABLE_JIT="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print raw results as JSON")
    args = ap.parse_args(argv)
    jit = run_backend(False, args.repeat)
    py = run_backend(True, args.repeat)
    if args.json:
        print(json.dumps({"jit": jit, "python": py}, indent=2))
        return 0
    print(f"{'workload':<22} {'numba (s)':>11} {'python (s)':>11} {'speedup':>8} {'warmup':>8}")
    for name, tj in jit["timings"].items():
        tp = py["timings"][name]
        print(f"{name:<22} {tj['best']:11.4f} {tp['best']:11.4f} "
              f"{tp['best'] / tj['best']:8.1f} {tj['warmup']:8.2f}")
    if jit["backend"] != "numba":
        print("note: numba unavailable, both columns use the Python fallback")
    return 0


if __name__ == "__main__":
    sys.exit(main())
