import json
import os
import subprocess
import sys

import pytest

from qtraj import backend

SCRIPT = r"""
import json, math
from qtraj import backend
from qtraj.basis import HarmonicGround, Linear, Scenario, build_basis
from qtraj.dynamics import Microstate, integrate_trajectory
from qtraj.specfun import airy_pair, dawson

out = {"backend": backend(), "airy": list(airy_pair(-7.3)), "dawson": dawson(2.5)}
sc = Scenario(HarmonicGround(), 10.0)
pair = build_basis(sc)
tr = integrate_trajectory(sc, pair, Microstate(6.0, 2.0), -sc.turning_points()[1], 0.0, 0.6)
out["events"] = [[e.t, e.x, e.kind] for e in tr.events]
out["x_end"] = float(tr.x[-1])
print(json.dumps(out))
"""


def _run(flag):
    env = dict(os.environ, QTRAJ_DISABLE_JIT=flag)
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True,
                         env=env, check=True, timeout=600)
    return json.loads(res.stdout)


@pytest.mark.slow
def test_python_fallback_matches_compiled():
    jit, py = _run("0"), _run("1")
    assert py["backend"] == "python"
    assert py["airy"] == pytest.approx(jit["airy"], rel=1e-13, abs=1e-15)
    assert py["dawson"] == pytest.approx(jit["dawson"], rel=1e-14)
    assert len(py["events"]) == len(jit["events"]) > 0
    for a, b in zip(py["events"], jit["events"]):
        assert a[2] == b[2]
        assert a[0] == pytest.approx(b[0], rel=1e-9)
    assert py["x_end"] == pytest.approx(jit["x_end"], rel=1e-9)


def test_backend_name():
    assert backend() in ("numba", "python")
