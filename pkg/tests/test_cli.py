"""Command-line interface: listing, runs, exports, reports, plot scripts."""

import json

import numpy as np
import pytest

from ivpsuite.cli import main


def run_cli(args):
    return main(args)


def test_list_contents(capsys):
    assert run_cli(["list"]) == 0
    out = capsys.readouterr().out
    assert "lorenz96" in out and "40" in out
    assert "qgso" in out and "16129" in out
    assert "hires" in out and "8" in out
    for family in ("linear", "bouncingball", "brusselator", "doublependulum",
                   "lorenz63", "grayscott", "bpe"):
        assert family in out


def test_run_csv_columns(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code = run_cli(
        ["run", "lorenz63", "--preset", "Canonical", "--tspan", "0:1",
         "--format", "csv", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,y1,y2,y3"
    assert all(len(line.split(",")) == 4 for line in lines)
    first = [float(v) for v in lines[1].split(",")]
    assert first == [0.0, 0.0, 1.0, 0.0]


def test_run_validation_error_exit_code(tmp_path, capsys):
    out = tmp_path / "never.csv"
    code = run_cli(
        ["run", "lorenz63", "--set", "rho=-1", "--out", str(out)]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "The field rho does not satisfy nonnegative" in err
    assert not out.exists()  # no partial output


def test_run_unknown_override_fails_before_output(tmp_path, capsys):
    out = tmp_path / "never.csv"
    code = run_cli(["run", "lorenz63", "--set", "zeta=3", "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_run_vector_override_message(tmp_path, capsys):
    code = run_cli(
        ["run", "lorenz63", "--set", "rho=[1,1]",
         "--out", str(tmp_path / "x.csv")]
    )
    assert code == 1
    assert "does not satisfy scalar" in capsys.readouterr().err


def test_run_events_json(tmp_path, capsys):
    out = tmp_path / "ball.json"
    code = run_cli(
        ["run", "bouncingball", "--preset", "RandomTerrain",
         "--integrator", "events", "--format", "json", "--out", str(out)]
    )
    assert code in (0, 2)
    doc = json.loads(out.read_text())
    assert doc["problem"] == "bouncingball"
    assert len(doc["events"]) >= 1
    assert doc["status"] in ("complete", "terminated_by_event")


def test_seed_flag_regenerates_terrain(tmp_path, capsys):
    outs = []
    for seed in ("3", "4"):
        out = tmp_path / f"ball{seed}.json"
        code = run_cli(
            ["run", "bouncingball", "--preset", "RandomTerrain", "--seed", seed,
             "--integrator", "events", "--format", "json", "--out", str(out)]
        )
        assert code in (0, 2)
        outs.append(json.loads(out.read_text())["states"])
    assert outs[0] != outs[1]


def test_json_roundtrip_bit_exact(tmp_path, capsys):
    from ivpsuite.cli import load_trajectory_json

    out = tmp_path / "traj.json"
    assert run_cli(
        ["run", "lorenz63", "--tspan", "0:2", "--format", "json",
         "--out", str(out)]
    ) == 0
    doc = load_trajectory_json(str(out))
    states = np.array(doc["states"])

    import ivpsuite as ivp

    problem = ivp.build_preset("lorenz63")
    traj = ivp.integrate_adaptive(problem, time_span=(0, 2))
    assert np.array_equal(states, traj.states)
    assert np.array_equal(np.array(doc["times"]), traj.times)


def test_csv_roundtrip_17_digits(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert run_cli(
        ["run", "lorenz63", "--tspan", "0:1", "--out", str(out)]
    ) == 0
    data = np.genfromtxt(out, delimiter=",", skip_header=1)

    import ivpsuite as ivp

    problem = ivp.build_preset("lorenz63")
    traj = ivp.integrate_adaptive(problem, time_span=(0, 1))
    assert np.array_equal(data[:, 0], traj.times)
    assert np.array_equal(data[:, 1:], traj.states)


def test_run_fixed_integrator(tmp_path, capsys):
    out = tmp_path / "fixed.csv"
    assert run_cli(
        ["run", "linear", "--integrator", "fixed:32", "--out", str(out)]
    ) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 34  # header + 33 rows


def test_run_implicit_integrator(tmp_path, capsys):
    out = tmp_path / "hires.csv"
    assert run_cli(
        ["run", "hires", "--integrator", "implicit", "--abs-tol", "1e-6",
         "--rel-tol", "1e-6", "--out", str(out)]
    ) == 0


def test_convergence_command(tmp_path, capsys):
    out = tmp_path / "conv.json"
    assert run_cli(
        ["convergence", "linear", "rk4", "16,32,64,128", "--out", str(out)]
    ) == 0
    doc = json.loads(out.read_text())
    assert abs(doc["observed_order"] - 4.0) <= 0.3


def test_plotscript_3d_phase(tmp_path, capsys):
    csv = tmp_path / "traj.csv"
    assert run_cli(["run", "lorenz63", "--tspan", "0:1", "--out", str(csv)]) == 0
    script = tmp_path / "traj.gp"
    assert run_cli(["plotscript", str(csv), "--out", str(script)]) == 0
    text = script.read_text()
    assert "splot" in text  # three state variables map to a 3D phase plot
    assert csv.name in text


def test_plotscript_2d_phase(tmp_path, capsys):
    csv = tmp_path / "b.csv"
    assert run_cli(["run", "brusselator", "--tspan", "0:1", "--out", str(csv)]) == 0
    script = tmp_path / "b.gp"
    assert run_cli(["plotscript", str(csv), "--out", str(script)]) == 0
    text = script.read_text()
    assert "using 2:3 with lines" in text


def test_unknown_family_exit(capsys):
    assert run_cli(["run", "nosuch"]) == 1
    assert "unknown problem family" in capsys.readouterr().err


def test_lyapunov_command_short_window(tmp_path, capsys):
    # a short window keeps this fast; full reproduction is in acceptance
    out = tmp_path / "lyap.json"
    code = run_cli(["lyapunov", "lorenz63", "5.0", "--tspan", "0:5",
                    "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["exponents"]) == 3
    assert doc["exponents"] == sorted(doc["exponents"], reverse=True)
