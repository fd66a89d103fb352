import json
import os
import subprocess
import sys

import pytest

from haldane_ions import cli
from haldane_ions.io import read_csv


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(p)


NN = {"model": {"couplings": {"nearest_neighbor": {"n_sites": 4}}, "lam": 1.0, "D": 0.5}}
TRAP = {"trap": {"n_ions": 4, "omega_axial_hz": 1e6, "omega_radial_hz": 5e6, "mass_amu": 40.0,
                 "lamb_dicke": 0.1},
        "drive": {"rabi_hz": 2e5, "detuning_hz": 5.1e6}}


def run(tmp_path, command, cfg, out="out", *extra):
    return cli.main([command, "--config", write(tmp_path, cfg), "--out", str(tmp_path / out), *extra])


def test_phase_point_and_manifest(tmp_path):
    assert run(tmp_path, "phase-point", NN) == 0
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    files = {e["file"] for e in man["outputs"]}
    assert files == {"phase_point.csv", "phase_point.json"}
    assert set(os.listdir(tmp_path / "out")) == files | {"manifest.json"}
    row = json.loads((tmp_path / "out" / "phase_point.json").read_text())
    assert row["gap"] > 0


def test_deterministic_outputs(tmp_path):
    cfg = dict(NN, noise={"gamma_hz": 100.0, "T_us": 500.0, "state": "ground", "sigma": 0.01, "draws": 3,
                          "targets": ["rabi"]})
    assert run(tmp_path, "noise", cfg, "a", "--seed", "42") == 0
    assert run(tmp_path, "noise", cfg, "b", "--seed", "42", "--workers", "2") == 0
    for name in ("noise.csv", "noise_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_malformed_json_exit_2(tmp_path, caplog):
    assert run(tmp_path, "modes", '{"trap": {\n  "n_ions": }') == 2
    assert "line 2" in caplog.text


def test_schema_violation_exit_2(tmp_path):
    assert run(tmp_path, "phase-point", dict(NN, bogus=1)) == 2
    bad = {"model": {"couplings": {"matrix": [[0, 1], [1, 0]], "nearest_neighbor": {"n_sites": 2}}}}
    assert run(tmp_path, "phase-point", bad) == 2


def test_lambda_range_depends_on_scheme(tmp_path):
    cfg = {"model": {"couplings": {"nearest_neighbor": {"n_sites": 4}}, "lam": 3.0}}
    assert run(tmp_path, "phase-point", cfg) == 2
    cfg["model"]["scheme"] = 2
    assert run(tmp_path, "phase-point", cfg) == 0


def test_missing_section_exit_2(tmp_path):
    assert run(tmp_path, "unwind", NN) == 2


def test_resonant_drive_exit_3(tmp_path):
    cfg = json.loads(json.dumps(TRAP))
    cfg["drive"]["detuning_hz"] = 5e6
    assert run(tmp_path, "couplings", cfg) == 3


def test_modes_and_couplings(tmp_path):
    assert run(tmp_path, "modes", TRAP, "m") == 0
    header, data = read_csv(tmp_path / "m" / "modes_radial.csv")
    assert header[:2] == ["mode", "frequency_hz"]
    assert data[-1, 1] == pytest.approx(5e6, rel=1e-12)
    assert run(tmp_path, "couplings", TRAP, "c") == 0
    summary = json.loads((tmp_path / "c" / "couplings_summary.json").read_text())
    assert "powerlaw_exponent" in summary


def test_trap_derived_model(tmp_path):
    cfg = dict(TRAP, model={"couplings": {"trap": True}, "lam": 1.0, "D": 0.0})
    assert run(tmp_path, "spectrum", cfg) == 0


def test_unwind(tmp_path):
    cfg = {"drive": {"scheme": 2, "omega_prime_hz": 10e3, "theta": 0.6, "omega_carrier_hz": 1e6},
           "unwind": {"tau_us": 37.0, "measurement_rotation": True}}
    assert run(tmp_path, "unwind", cfg) == 0
    doc = json.loads((tmp_path / "out" / "unwind_schedule.json").read_text())
    assert [s["stage"] for s in doc["stages"]][-1] == "measurement rotation"
    assert doc["stages"][1]["duration_us"] == pytest.approx(63.0, rel=1e-9)


def test_sweep_resume_and_failures(tmp_path, monkeypatch):
    cfg = {"model": {"couplings": {"nearest_neighbor": {"n_sites": 4}}, "scheme": 2},
           "sweep": {"lam": [0.5, 3.0, 2], "D": [0.0, 1.0, 2]}}
    assert run(tmp_path, "sweep", cfg, "s", "--workers", "2") == 0
    out = tmp_path / "s"
    first = (out / "sweep.csv").read_bytes()
    kept = out / "points" / "point_000_000.json"
    mtime = kept.stat().st_mtime_ns
    (out / "points" / "point_001_001.json").unlink()
    assert run(tmp_path, "sweep", cfg, "s", "--workers", "1") == 0
    assert kept.stat().st_mtime_ns == mtime
    assert (out / "sweep.csv").read_bytes() == first

    real = cli._phase_point

    def flaky(params, scheme):
        if params.lam > 1:
            raise RuntimeError("synthetic failure")
        return real(params, scheme)

    monkeypatch.setattr(cli, "_phase_point", flaky)
    assert run(tmp_path, "sweep", cfg, "f", "--workers", "1") == 0
    summary = json.loads((tmp_path / "f" / "sweep_summary.json").read_text())
    assert summary["completed"] == 2 and len(summary["failures"]) == 2


def test_ramp_small(tmp_path):
    cfg = {"ramp": {"n_sites": 4, "T": 30.0, "dt": 0.25, "record_every": 10}}
    assert run(tmp_path, "ramp", cfg) == 0
    header, data = read_csv(tmp_path / "out" / "ramp.csv")
    assert header[5] == "fidelity"
    assert abs(data[:, 7]).max() < 1e-10


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, NN)
    r = subprocess.run([sys.executable, "-m", "haldane_ions", "phase-point", "--config", cfg,
                        "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
