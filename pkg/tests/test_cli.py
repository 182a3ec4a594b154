import csv
import json
import re
import subprocess
import sys

import numpy as np

import kdentangle as ke

RUN = [sys.executable, "-m", "kdentangle"]


def run_cli(*args, cwd=None):
    return subprocess.run(
        RUN + list(args), capture_output=True, text=True, cwd=cwd
    )


def strip_timing(text: str) -> str:
    return re.sub(r'"wall_time_s": [0-9.e-]+', '"wall_time_s": X', text)


def test_kd_dist_bell(tmp_path):
    out = tmp_path / "table.csv"
    res = run_cli("kd-dist", "--builtin", "bell", "--basis-a", "computational",
                  "--basis-y", "computational", "--out", str(out))
    assert res.returncode == 0
    assert "nonreality: 0" in res.stdout
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    cells = {(r["x"], r["y"]): (float(r["re"]), float(r["im"])) for r in rows}
    assert cells[("0", "0")] == (0.5, 0.0)
    assert cells[("1", "3")] == (0.5, 0.0)
    assert all(v == (0.0, 0.0) for k, v in cells.items()
               if k not in (("0", "0"), ("1", "3")))


def test_kd_dist_bad_dims_file(tmp_path):
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"dims": [2], "kind": "pure", "data": []}))
    res = run_cli("kd-dist", "--state", str(path))
    assert res.returncode == 2
    assert "dims" in res.stderr


def test_kd_dist_reconstruct_singular(tmp_path):
    res = run_cli("kd-dist", "--builtin", "bell", "--reconstruct",
                  "--out", str(tmp_path / "t.csv"))
    assert res.returncode == 3


def test_kd_dist_reconstruct_roundtrip(tmp_path):
    res = run_cli("kd-dist", "--builtin", "bell", "--reconstruct",
                  "--basis-y", "random:3", "--out", str(tmp_path / "t.csv"))
    assert res.returncode == 0
    m = re.search(r"reconstruction trace distance: ([0-9.e-]+)", res.stdout)
    assert m and float(m.group(1)) <= 1e-8


def test_pure_bell_report():
    res = run_cli("pure", "--builtin", "bell")
    assert res.returncode == 0
    report = json.loads(res.stdout)
    assert report["value"] == 1.0
    assert report["concurrence"] == 1.0


def test_pure_accepts_rank_one_density(tmp_path):
    path = tmp_path / "state.json"
    ke.save_state(ke.bell_state().density(), path)
    res = run_cli("pure", "--state", str(path))
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == 1.0


def test_pure_rejects_mixed_density(tmp_path):
    path = tmp_path / "state.json"
    ke.save_state(ke.werner_state(0.5), path)
    res = run_cli("pure", "--state", str(path))
    assert res.returncode == 2
    assert "pure" in res.stderr


def test_mixed_werner_half():
    res = run_cli("mixed", "--builtin", "werner:0.5", "--restarts", "16",
                  "--terms", "4")
    assert res.returncode == 0
    report = json.loads(res.stdout)
    assert abs(report["normalized"] - 0.25) <= 2e-3
    assert abs(sum(report["probabilities"]) - 1.0) < 1e-9


def test_bounds_maximally_mixed():
    res = run_cli("bounds", "--builtin", "werner:0.0", "--restarts", "4")
    assert res.returncode == 0
    report = json.loads(res.stdout)
    assert report["lower"] <= 1e-8
    assert abs(report["upper"] - 1.0) < 1e-9


def test_verify_lemma1():
    res = run_cli("verify", "--suite", "lemma1", "--seed", "7")
    assert res.returncode == 0
    assert "lemma1: PASS" in res.stdout


def test_verify_failure_exit_code():
    # the mixed-state lower-bound suite documents a disproven inequality and
    # reports FAIL; the command must exit 1
    res = run_cli("verify", "--suite", "prop5", "--count", "4")
    assert res.returncode == 1
    assert "prop5: FAIL" in res.stdout


def test_optimizer_failure_exit_code(monkeypatch):
    from kdentangle import cli
    from kdentangle.errors import OptimizerFailed

    def boom(*args, **kwargs):
        raise OptimizerFailed("simulated bound violation")

    monkeypatch.setattr(cli, "mixed_entanglement", boom)
    code = cli.main(["mixed", "--builtin", "werner:0.5"])
    assert code == 4


def test_verify_dims_cap():
    res = run_cli("verify", "--suite", "prop2", "--dims", "5x5")
    assert res.returncode == 2
    assert "dims" in res.stderr


def test_verify_unknown_suite():
    res = run_cli("verify", "--suite", "nonsense")
    assert res.returncode == 2


def test_weak_sim_bell(tmp_path):
    res = run_cli("weak-sim", "--builtin", "bell", "--shots", "100000",
                  "--records", str(tmp_path / "rec.csv"))
    assert res.returncode == 0
    report = json.loads(res.stdout)
    assert abs(report["estimate"] - 1.0) <= 5 * 4 / np.sqrt(100000)
    with open(tmp_path / "rec.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert sum(int(r["count"]) for r in rows) == 4 * 100000


def test_weak_sim_shot_floor(tmp_path):
    res = run_cli("weak-sim", "--builtin", "bell", "--shots", "10",
                  "--records", str(tmp_path / "rec.csv"))
    assert res.returncode == 2


def test_weak_sim_rejects_mixed(tmp_path):
    path = tmp_path / "state.json"
    ke.save_state(ke.werner_state(0.5), path)
    res = run_cli("weak-sim", "--state", str(path), "--shots", "10000",
                  "--records", str(tmp_path / "rec.csv"))
    assert res.returncode == 2


def test_outputs_deterministic(tmp_path):
    args = ("pure", "--builtin", "random-pure:9", "--dims", "2x3")
    a = run_cli(*args)
    b = run_cli(*args)
    assert strip_timing(a.stdout) == strip_timing(b.stdout)

    args = ("weak-sim", "--builtin", "bell", "--shots", "20000",
            "--records", str(tmp_path / "r.csv"))
    a = run_cli(*args, cwd=str(tmp_path))
    b = run_cli(*args, cwd=str(tmp_path))
    assert strip_timing(a.stdout) == strip_timing(b.stdout)


def test_state_and_builtin_conflict():
    res = run_cli("pure", "--state", "x.json", "--builtin", "bell")
    assert res.returncode == 2


def test_unknown_builtin():
    res = run_cli("pure", "--builtin", "glome")
    assert res.returncode == 2
