import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qtraj.cli import CSV_HEADER, main
from qtraj.cli.config import ConfigError, RunConfig, load_config, resolve
from qtraj.cli.presets import build_figure, get_preset
from qtraj.cli.svg import nice_ticks

FREE = ["--potential", "constant", "--energy-ev", "10", "--v0-ev", "0"]
from qtraj.constants import ELECTRON_MASS, HBAR

DX10 = math.pi * HBAR / math.sqrt(2 * ELECTRON_MASS * 10.0)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_writes_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", *FREE, "--a", "10", "--t-end-fs", "0.5",
                       "--out", str(tmp_path), "--format", "csv,json,svg")
    assert code == 0
    text = (tmp_path / "trajectory.csv").read_bytes().decode("utf-8")
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER) == "t_fs,x_angstrom,v_angstrom_per_fs,branch"
    assert "\r" not in text and text.endswith("\n")
    row = lines[1].split(",")
    assert float(row[0]) == 0.0 and row[3] == "1"
    side = json.loads((tmp_path / "trajectory.json").read_text())
    assert side["status"] == "completed"
    assert side["constants"]["hbar_eV_fs"] == pytest.approx(0.6582119569509066)
    assert {"rtol", "atol", "epsilon_turn"} <= set(side["tolerances"])
    assert side["microstate"]["a"] == 10.0
    assert len([e for e in side["events"] if e["kind"] == "node"]) == 5
    assert (tmp_path / "trajectory.svg").read_text().startswith("<svg")


def test_csv_values_round_trip(tmp_path, capsys):
    main(["simulate", *FREE, "--a", "3", "--b", "2", "--t-end-fs", "0.2", "--out", str(tmp_path),
          "--samples", "11"])
    capsys.readouterr()
    for line in (tmp_path / "trajectory.csv").read_text().splitlines()[1:]:
        for field in line.split(",")[:3]:
            assert repr(float(field)) == field


def test_csv_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        d = tmp_path / str(i)
        main(["simulate", "--potential", "harmonic_ground", "--energy-ev", "10", "--a", "0.8",
              "--b", "1", "--x0-angstrom", "-0.61725", "--t-end-fs", "1.0", "--out", str(d)])
        outs.append((d / "trajectory.csv").read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_sidecar_records_normalised_microstate(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", *FREE, "--a", "-2", "--b", "1", "--t-end-fs", "0.1",
                     "--out", str(tmp_path))
    assert code == 0
    side = json.loads((tmp_path / "trajectory.json").read_text())
    assert side["microstate"]["a"] == 2.0 and side["microstate"]["b"] == -1.0
    # the default direction (+x) fixes the branch once a W > 0
    assert side["microstate"]["branch"] == 1
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert float(lines[-1].split(",")[1]) > 0


def test_missing_a_names_field(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", *FREE, "--t-end-fs", "1", "--out", str(tmp_path))
    assert code == 2 and "'a'" in err


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": "constant", "energy_ev": 10.0, "v0_ev": 0.0,
                               "a": 1.0, "t_end_fs": 0.3}))
    code, _, _ = run(capsys, "simulate", "--config", str(cfg), "--a", "10",
                     "--out", str(tmp_path / "o"))
    assert code == 0
    side = json.loads((tmp_path / "o" / "trajectory.json").read_text())
    assert side["config"]["a"] == 10.0


@pytest.mark.parametrize("doc, word", [
    ({"potential": "constant", "energy_ev": 10, "a": 1, "t_end_fs": 1}, "v0_ev"),
    ({"potential": "constant", "energy_ev": 10, "v0_ev": 0, "g_ev_per_angstrom": 1, "a": 1,
      "t_end_fs": 1}, "g_ev_per_angstrom"),
    ({"potential": "constant", "energy_ev": 10, "v0_ev": 0, "a": 0, "t_end_fs": 1}, "'a'"),
    ({"potential": "constant", "energy_ev": 10, "v0_ev": 0, "a": 1, "t_end_fs": 1,
      "t0_fs": 2}, "t_end_fs"),
    ({"potential": "constant", "energy_ev": 10, "v0_ev": 0, "a": 1, "t_end_fs": 1,
      "bogus": 1}, "bogus"),
    ({"potential": "cubic", "energy_ev": 10, "a": 1, "t_end_fs": 1}, "potential"),
    ({"potential": "constant", "energy_ev": 5, "v0_ev": 10, "a": 1, "t_end_fs": 1}, "sign"),
])
def test_config_validation(tmp_path, capsys, doc, word):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(doc))
    code, _, err = run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 2 and word in err


def test_forbidden_start_needs_sign_and_exits_3(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--potential", "constant", "--energy-ev", "5",
                     "--v0-ev", "10", "--a", "1", "--sign", "+", "--t-end-fs", "1",
                     "--out", str(tmp_path))
    assert code == 3
    side = json.loads((tmp_path / "trajectory.json").read_text())
    assert side["status"] == "diverged"
    assert (tmp_path / "trajectory.csv").exists()


def test_closed_form_constants():
    cfg = RunConfig(potential="constant", energy_ev=10.0, v0_ev=0.0, a=10.0, b=0.0,
                    t_end_fs=1.0, constants_form="closed_form")
    run = resolve(cfg)
    assert run.microstate.a == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        resolve(RunConfig(potential="linear", energy_ev=10.0, g_ev_per_angstrom=0.6, a=1.0,
                          t_end_fs=1.0, constants_form="closed_form"))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    p = tmp_path / "list.json"
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(str(p))


def test_nodes_constant(capsys):
    code, out, _ = run(capsys, "nodes", *FREE, "--a", "3", "--b", "2",
                       "--t-end-fs", str(5 * 0.103392))
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,t_fs,x_angstrom,kind"
    xs = np.array([float(line.split(",")[2]) for line in lines[1:]])
    assert len(xs) == 5
    np.testing.assert_allclose(np.diff(xs), DX10, rtol=1e-6)


def test_nodes_harmonic_rows_per_half_period(capsys):
    code, out, _ = run(capsys, "nodes", "--potential", "harmonic_ground", "--energy-ev", "10",
                       "--a", "0.8", "--b", "1", "--x0-angstrom", "-0.61725",
                       "--t-end-fs", "1.2")
    kinds = [line.split(",")[3] for line in out.strip().split("\n")[1:]]
    assert code == 0 and kinds == ["turning_point", "turning_point"]
    code, out, _ = run(capsys, "nodes", "--potential", "harmonic_excited1", "--energy-ev", "30",
                       "--a", "0.3564", "--b", "0.5", "--x0-angstrom", "-1.06911",
                       "--t-end-fs", "0.9")
    kinds = [line.split(",")[3] for line in out.strip().split("\n")[1:]]
    # start turning point, node at x = 0, far turning point, node on the way back
    assert code == 0 and kinds[:2] == ["phi2_zero", "turning_point"]
    assert kinds.count("phi2_zero") == 2


def test_barrier_bd(capsys):
    code, out, _ = run(capsys, "barrier", "--v0-ev", "20", "--e-ev", "10", "--q-angstrom", "20")
    assert code == 0
    rows = [line for line in out.splitlines() if line and not line.startswith(("#", "x_"))]
    t_final = float(rows[-1].split(",")[1])
    assert t_final * 1e-15 == pytest.approx(2.5848e-17, rel=1e-4)
    assert "monotone=true" in out


def test_barrier_floyd(capsys):
    code, out, _ = run(capsys, "barrier", "--v0-ev", "20", "--e-ev", "10", "--q-angstrom", "20",
                       "--method", "floyd")
    assert code == 0 and "monotone=false" in out
    ext = float(out.split("extremum_x_angstrom=")[1].split()[0])
    assert 0 < ext < 20


def test_barrier_rejects_e_above_v0(capsys):
    code, _, err = run(capsys, "barrier", "--v0-ev", "10", "--e-ev", "12", "--q-angstrom", "1")
    assert code == 2 and err


@pytest.mark.parametrize("fid", [1, 2, 3, 4, 5, 6])
def test_figures_render(tmp_path, capsys, fid):
    code, _, _ = run(capsys, "figure", "--id", str(fid), "--out", str(tmp_path),
                     "--samples", "300")
    assert code == 0
    svg = (tmp_path / f"figure{fid}.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_figure_unknown_id(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["figure", "--id", "7"])
    assert exc.value.code == 2
    with pytest.raises(ValueError):
        get_preset(9)


def test_figure1_content():
    data = build_figure(1, samples=300)
    assert len(data.trajectories) == 4
    assert [s.label for s in data.chart.series][-1] == "Classical trajectory"
    assert len(data.chart.markers) >= 5
    times = [sorted(e.t for e in tr.events if e.kind == "node") for tr in data.trajectories]
    for tl in times[1:]:
        np.testing.assert_allclose(tl, times[0], rtol=1e-8)


def test_figure3_and_6_content():
    d3 = build_figure(3, samples=200)
    assert len(d3.trajectories) == 1 and d3.chart.markers == []
    ms = d3.trajectories[0].microstate
    assert abs(ms.a) == 10.0 and abs(ms.b) == pytest.approx(1 / math.sqrt(3))
    d6 = build_figure(6, samples=200)
    assert len(d6.trajectories) == 2
    xm = d6.preset.scenario.turning_points()[1]
    for tr, sgn in zip(d6.trajectories, (1, -1)):
        assert tr.status == "diverged"
        assert np.all(sgn * tr.x >= xm * (1 - 1e-4))


def test_figure4_first_maximum():
    d4 = build_figure(4, samples=200)
    xm = d4.preset.scenario.turning_points()[1]
    for tr in d4.trajectories:
        assert tr.events_of("branch_flip")[0].x == pytest.approx(xm, rel=1e-6)


def test_check_command(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(capsys, "check", "--epsilon-turn", "0.5")
    assert code == 1 and "FAIL" in out


def test_nice_ticks():
    assert nice_ticks(0.0, 1.0) == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert nice_ticks(1.0, 1.0) == [1.0]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qtraj", "barrier", "--v0-ev", "20", "--e-ev",
                          "10", "--q-angstrom", "1", "--points", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("x_angstrom,T_fs")
