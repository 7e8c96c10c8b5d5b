"""Command-line behavior: exit codes, JSON/CSV output, determinism."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from torsmink import cli
from torsmink.geometry import (
    box_polytope,
    measure_from_json,
    polytope_from_json,
    polytope_to_json,
)
from torsmink.serialize import dump_path, load_path


@pytest.fixture()
def square_path(tmp_path):
    path = tmp_path / "square.json"
    dump_path(polytope_to_json(box_polytope(0.5, 0.5)), path)
    return str(path)


def test_solve_pde_output_schema(square_path, tmp_path):
    out = tmp_path / "sol.json"
    assert cli.main(["solve-pde", "--body", square_path, "--out", str(out)]) == 0
    data = load_path(out)
    assert data["converged"] is True
    assert len(data["values"]) == len(data["nodes"])
    assert data["tau_volume"] > 0


def test_torsion_report_fields(square_path, tmp_path):
    out = tmp_path / "report.json"
    assert cli.main(["torsion", "--body", square_path, "--out", str(out)]) == 0
    rep = load_path(out)
    for key in ("tau_volume", "tau_boundary", "tau_energy"):
        assert key in rep and rep[key] > 0


def test_torsion_csv_sweep(square_path, tmp_path):
    out = tmp_path / "sweep.csv"
    rc = cli.main(
        ["torsion", "--body", square_path, "--body", square_path, "--csv", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(cli.CSV_COLUMNS)
    assert len(lines) == 3
    cells = lines[1].split(",")
    assert cells[0] == "square.json"
    assert float(cells[2]) > 0


def test_measure_output_round_trips(square_path, tmp_path):
    out = tmp_path / "measure.json"
    assert cli.main(["measure", "--body", square_path, "--out", str(out)]) == 0
    data = load_path(out)
    mu = measure_from_json(data["facet_measure"])
    assert len(mu) == 4
    assert data["validation"]["ok"] is True
    assert data["cone_measure"] is not None


def test_minkowski_round_trip_via_files(square_path, tmp_path):
    meas = tmp_path / "measure.json"
    cli.main(["measure", "--body", square_path, "--out", str(meas)])
    mu_path = tmp_path / "mu.json"
    dump_path(load_path(meas)["facet_measure"], mu_path)
    out = tmp_path / "run.json"
    assert cli.main(["minkowski", "--measure", str(mu_path), "--out", str(out)]) == 0
    run = load_path(out)
    assert run["converged"] is True
    solution = polytope_from_json(run["solution"])
    assert solution.n_facets == 4


def test_bad_centroid_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad_centroid.json"
    dump_path(
        {
            "atoms": [
                {"dir": [1.0, 0.0], "weight": 2.0},
                {"dir": [-1.0, 0.0], "weight": 1.0},
                {"dir": [0.0, 1.0], "weight": 1.0},
                {"dir": [0.0, -1.0], "weight": 1.0},
            ]
        },
        bad,
    )
    rc = cli.main(["minkowski", "--measure", str(bad)])
    err = json.loads(capsys.readouterr().err)
    assert rc == 1
    assert err["kind"] == "centroid_nonzero"
    assert "message" in err and "context" in err


def test_nonconvergence_exit_code(square_path, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    dump_path({"h_max": 0.1, "grad_tol": 1e-8, "max_iters": 2, "delta": None}, cfg)
    out = tmp_path / "partial.json"
    rc = cli.main(
        ["solve-pde", "--body", square_path, "--cfg", str(cfg), "--out", str(out)]
    )
    err = json.loads(capsys.readouterr().err)
    assert rc == 2
    assert err["kind"] == "nonconvergence"
    partial = load_path(out)
    assert partial["converged"] is False


def test_usage_errors_are_structured(tmp_path, capsys):
    rc = cli.main(["log-minkowski"])
    err = json.loads(capsys.readouterr().err)
    assert rc == 1
    assert err["kind"] == "invalid_input"
    rc = cli.main(["solve-pde", "--body", str(tmp_path / "missing.json")])
    err = json.loads(capsys.readouterr().err)
    assert rc == 1
    assert err["kind"] == "invalid_input"


def test_invalid_p_rejected(square_path, capsys):
    rc = cli.main(["torsion", "--body", square_path, "--p", "1.0"])
    err = json.loads(capsys.readouterr().err)
    assert rc == 1
    assert err["kind"] == "invalid_input"


def test_verify_fast_deterministic(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert cli.main(["verify", "--suite", "fast", "--seed", "7", "--out", str(a)]) == 0
    assert cli.main(["verify", "--suite", "fast", "--seed", "7", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    report = load_path(a)
    assert report["failed"] == 0
    for inv in report["invariants"]:
        assert set(inv) == {"name", "status", "observed", "tolerance"}


def test_verify_thread_count_independent(tmp_path):
    paths = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}.json"
        env = dict(os.environ)
        env["OMP_NUM_THREADS"] = threads
        env["OPENBLAS_NUM_THREADS"] = threads
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "torsmink.cli",
                "verify",
                "--suite",
                "fast",
                "--seed",
                "7",
                "--out",
                str(out),
            ],
            env=env,
            capture_output=True,
            text=True,
            timeout=600,
        )
        assert proc.returncode == 0, proc.stderr
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verify_failure_writes_report(tmp_path, capsys, monkeypatch):
    # force one invariant wrong: the suite must still write the report,
    # flag the failure, and exit 1
    monkeypatch.setattr(cli, "SQUARE_TAU_SERIES", 1.0)
    out = tmp_path / "bad.json"
    rc = cli.main(["verify", "--suite", "fast", "--seed", "7", "--out", str(out)])
    err = json.loads(capsys.readouterr().err)
    assert rc == 1
    assert err["kind"] == "verify_failed"
    report = load_path(out)
    assert report["failed"] >= 1
    failed = [r["name"] for r in report["invariants"] if r["status"] == "fail"]
    assert "square_tau_vs_series" in failed
