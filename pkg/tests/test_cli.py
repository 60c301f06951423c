import json
import subprocess
import sys

import pytest

from cspulse.cli import main
from cspulse.io import load_instance, read_csv, read_report

from conftest import fixture_path

H2 = str(fixture_path("h2_sto3g"))
LIH = str(fixture_path("lih_sto3g_cas6"))
H4 = str(fixture_path("h4_chain_sto3g"))


def test_inspect(capsys, tmp_path):
    assert main(["inspect", H2, "--out", str(tmp_path / "i.json")]) == 0
    out = capsys.readouterr().out
    assert "qubits: 4" in out and "terms: 15" in out and "exact ground: -1.1373060358" in out
    doc = json.loads((tmp_path / "i.json").read_text())
    assert doc["config"]["seed"] == 0 and doc["n_qubits"] == 4


def test_stages_compose(tmp_path, capsys):
    d = str(tmp_path)
    assert main(["taper", LIH, "--out-dir", d]) == 0
    tapered = tmp_path / "lih_sto3g_cas6_tapered.ham"
    inst = load_instance(tapered)
    assert inst.n == 4 and "config" in inst.metadata
    assert main(["split", str(tapered), "--out-dir", d]) == 0
    assert main(["group", str(tmp_path / "lih_sto3g_cas6_tapered_c.ham"), "--out-dir", d]) == 0
    assert main(["reduce", str(tapered), "--no-taper", "--qubits", "3", "--out-dir", d]) == 0
    reduced = load_instance(tmp_path / "lih_sto3g_cas6_tapered_reduced3.ham")
    assert reduced.n == 3
    assert main(["solve", str(tmp_path / "lih_sto3g_cas6_tapered_reduced3.ham"), "--no-taper",
                 "--oracle-vqe", "--out", str(tmp_path / "r.json")]) == 0
    rows = read_csv(tmp_path / "lih_sto3g_cas6_tapered_c_groups.csv")
    assert {r["mode"] for r in rows} == {"qubitwise", "general"}


def test_reduce_then_solve_matches_direct_pipeline(tmp_path):
    d = str(tmp_path)
    assert main(["reduce", LIH, "--qubits", "2", "--out-dir", d]) == 0
    red = load_instance(tmp_path / "lih_sto3g_cas6_reduced2.ham")
    e_nc = float(red.metadata["e_nc"])
    assert main(["solve", str(tmp_path / "lih_sto3g_cas6_reduced2.ham"), "--no-taper", "--oracle-vqe",
                 "--out", str(tmp_path / "a.json")]) == 0
    assert main(["solve", LIH, "--qubits", "2", "--oracle-vqe", "--out", str(tmp_path / "b.json")]) == 0
    from cspulse.pauli import exact_ground
    direct = read_report(tmp_path / "b.json")
    assert e_nc + exact_ground(red.hamiltonian)[0] == pytest.approx(direct.e_csvqe, abs=1e-10)


def test_solve_twice_is_byte_identical(tmp_path):
    for k in (1, 2):
        assert main(["solve", LIH, "--qubits", "3", "--ansatz", "pulse", "--seed", "7", "--max-iterations", "15",
                     "--out", str(tmp_path / f"r{k}.json")]) == 0
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    rep = read_report(tmp_path / "r1.json")
    assert rep.seed == 7 and rep.config["seed"] == 7


def test_sweep_csv_matches_json(tmp_path):
    out = tmp_path / "s.json"
    assert main(["solve", H4, "--sweep", "--oracle-vqe", "--out", str(out)]) == 0
    reports = read_report(out)
    rows = read_csv(tmp_path / "s.csv")
    assert [int(r["n_target"]) for r in rows] == [r.n_contextual for r in reports]
    for row, rep in zip(rows, reports):
        assert float(row["error"]) == rep.error
        assert float(row["e_csvqe"]) == rep.e_csvqe


def test_report_writes_csv_and_figures(tmp_path):
    out = tmp_path / "s.json"
    assert main(["solve", H2, "--sweep", "--max-iterations", "30", "--out", str(out)]) == 0
    assert main(["report", str(out), "--out-dir", str(tmp_path / "rep")]) == 0
    names = {p.name for p in (tmp_path / "rep").iterdir()}
    assert {"s_sweep.csv", "s_groups.csv", "s_trace.csv", "s_error.png", "s_groups.png", "s_convergence.png"} <= names
    assert (tmp_path / "rep" / "s_error.png").read_bytes()[:4] == b"\x89PNG"
    assert (tmp_path / "rep" / "s_trace.csv").read_text().startswith("# config:")


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CSPULSE_OUT", str(tmp_path / "env"))
    assert main(["taper", H2]) == 0
    assert (tmp_path / "env" / "h2_sto3g_tapered.ham").exists()


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "oracle_vqe": True}))
    assert main(["--config", str(cfg), "solve", H2, "--out", str(tmp_path / "a.json")]) == 0
    assert read_report(tmp_path / "a.json").seed == 5
    assert main(["--config", str(cfg), "solve", H2, "--seed", "9", "--out", str(tmp_path / "b.json")]) == 0
    rep = read_report(tmp_path / "b.json")
    assert rep.seed == 9 and rep.ansatz == "oracle"


def test_usage_errors_exit_2(capsys):
    for argv in (["bogus"], ["solve", H2, "--frobnicate"], ["reduce", H2], []):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2


def test_stage_failure_exit_1(tmp_path, capsys):
    assert main(["solve", LIH, "--qubits", "12", "--oracle-vqe", "--out", str(tmp_path / "r.json")]) == 1
    assert "stage 'project'" in capsys.readouterr().err
    bad = tmp_path / "bad.ham"
    bad.write_text("{")
    assert main(["inspect", str(bad)]) == 1
    assert "stage 'load'" in capsys.readouterr().err


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cspulse.cli", "inspect", H2], capture_output=True, text=True)
    assert proc.returncode == 0 and "qubits: 4" in proc.stdout


def test_reduce_sweep_writes_every_threshold(tmp_path):
    assert main(["reduce", LIH, "--sweep", "--out-dir", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "lih_sto3g_cas6_reduce_sweep.json").read_text())
    ks = [f["n_target"] for f in doc["thresholds"]]
    assert ks == list(range(ks[0], doc["n_tapered"] + 1))
    for f in doc["thresholds"]:
        if f["file"] is None:
            # the correction vanishes entirely on the smallest subspace
            assert f["terms_reduced"] == 0 and f["constant_shift"] == 0.0
        else:
            assert load_instance(tmp_path / f["file"]).n == f["n_target"]
