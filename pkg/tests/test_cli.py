import json

from dqcc.cli import main
from dqcc import gadgets

from conftest import CORPUS_DIR, corpus_text


def test_compile_writes_report_and_exits_zero(tmp_path):
    report = tmp_path / "r.json"
    rc = main(["compile", str(CORPUS_DIR / "tof_3.qasm"), "--report", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    for key in ("name", "num_qubits", "seed", "dt", "base_total_2q",
                "base_interqpu_trivial", "global_interqpu", "local_interqpu",
                "local_total_2q_logical", "local_total_2q_expanded",
                "epr_consumed", "compile_runtime_seconds", "hardware"):
        assert key in doc, key
    assert doc["num_qubits"] == 5
    assert doc["base_total_2q"] == 18


def test_compile_emits_expanded_qasm(tmp_path):
    out = tmp_path / "out.qasm"
    rc = main(["compile", str(CORPUS_DIR / "tof_3.qasm"),
               "--expand-gadgets", "--emit", str(out)])
    assert rc == 0
    from dqcc import parse_qasm
    expanded = parse_qasm(out.read_text())
    assert expanded.num_qubits == 10  # 2 QPUs x (3 data + 2 EPR)


def test_compile_malformed_input_exit_1(tmp_path):
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0; qreg q[2]; cnot q[0],q[1];")
    assert main(["compile", str(bad)]) == 1


def test_compile_capacity_exhausted_exit_2(tmp_path):
    hwfile = tmp_path / "hw.yaml"
    hwfile.write_text(
        "qpus:\n"
        "  - {id: qpu0, data_capacity: 2, epr_slots: 2}\n"
        "  - {id: qpu1, data_capacity: 2, epr_slots: 2}\n"
        "links:\n"
        "  - {qpu_a: qpu0, qpu_b: qpu1, channels: 2}\n")
    rc = main(["compile", str(CORPUS_DIR / "gf2_10_mult.qasm"), "--hardware", str(hwfile)])
    assert rc == 2


def test_compile_with_custom_durations(tmp_path):
    hwfile = tmp_path / "hw.yaml"
    hwfile.write_text(
        "qpus:\n"
        "  - {id: a, data_capacity: 3, epr_slots: 2}\n"
        "  - {id: b, data_capacity: 3, epr_slots: 2}\n"
        "links:\n"
        "  - {qpu_a: a, qpu_b: b, channels: 2}\n"
        "durations: {rx: 1, rz: 1, h: 1, cx: 3, measure: 4, epr_period: 50}\n")
    report = tmp_path / "r.json"
    rc = main(["compile", str(CORPUS_DIR / "tof_3.qasm"), "--hardware", str(hwfile),
               "--report", str(report)])
    assert rc == 0
    assert json.loads(report.read_text())["dt"] == 50.0


def test_bench_runs_corpus_and_reports(tmp_path):
    small = tmp_path / "corpus"
    small.mkdir()
    for name in ("tof_3", "mod5_4"):
        (small / f"{name}.qasm").write_text(corpus_text(name))
    report = tmp_path / "bench.json"
    rc = main(["bench", str(small), "--repeats", "2", "--report", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["schema_version"] == 1
    recs = {r["name"]: r for r in doc["circuits"]}
    assert set(recs) == {"tof_3", "mod5_4"}
    assert len(recs["tof_3"]["runs"]) == 2
    seeds = {run["seed"] for run in recs["tof_3"]["runs"]}
    assert seeds == {0, 1}
    assert "global_interqpu_std" in recs["tof_3"]


def test_bench_csv_report(tmp_path):
    small = tmp_path / "corpus"
    small.mkdir()
    (small / "tof_3.qasm").write_text(corpus_text("tof_3"))
    report = tmp_path / "bench.csv"
    assert main(["bench", str(small), "--report", str(report)]) == 0
    lines = report.read_text().strip().splitlines()
    assert lines[0].startswith("name,num_qubits,seed,dt,base_total_2q")
    assert len(lines) == 2


def test_bench_full_corpus_reproduces_recorded_baselines(tmp_path):
    report = tmp_path / "full.json"
    assert main(["bench", str(CORPUS_DIR), "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    recs = {r["name"]: r for r in doc["circuits"]}
    from dqcc.corpusgen import TABLE_OF_RECORD, recorded_baseline
    for name in TABLE_OF_RECORD:
        baseline = recorded_baseline(name)
        assert recs[name]["base_total_2q"] == baseline["total_2q"]
        assert recs[name]["base_interqpu_trivial"] == baseline["interqpu_trivial"]
        assert recs[name]["num_qubits"] == baseline["num_qubits"]


def test_bench_empty_corpus_exit_1(tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    assert main(["bench", str(empty)]) == 1


def test_bench_partial_failure_still_succeeds(tmp_path, capsys):
    small = tmp_path / "corpus"
    small.mkdir()
    (small / "tof_3.qasm").write_text(corpus_text("tof_3"))
    (small / "broken.qasm").write_text("OPENQASM 3.0; qubit[2] q;")
    assert main(["bench", str(small)]) == 0
    assert "broken: FAILED" in capsys.readouterr().err


def test_compile_unlinked_hardware_exit_1(tmp_path):
    hwfile = tmp_path / "hw.yaml"
    hwfile.write_text(
        "qpus:\n"
        "  - {id: a, data_capacity: 3, epr_slots: 2}\n"
        "  - {id: b, data_capacity: 3, epr_slots: 2}\n"
        "links: []\n")
    f = tmp_path / "pair.qasm"
    f.write_text("OPENQASM 2.0;\nqreg q[6];\ncx q[0],q[5];\ncx q[1],q[4];\n"
                 "cx q[2],q[3];\ncx q[0],q[3];\n")
    assert main(["compile", str(f), "--hardware", str(hwfile)]) == 1


def test_compile_three_qpu_hardware_exit_1(tmp_path):
    hwfile = tmp_path / "hw3.yaml"
    hwfile.write_text(
        "qpus:\n"
        "  - {id: a, data_capacity: 2, epr_slots: 2}\n"
        "  - {id: b, data_capacity: 2, epr_slots: 2}\n"
        "  - {id: c, data_capacity: 2, epr_slots: 2}\n"
        "links:\n"
        "  - {qpu_a: a, qpu_b: b, channels: 1}\n"
        "  - {qpu_a: b, qpu_b: c, channels: 1}\n")
    assert main(["compile", str(CORPUS_DIR / "tof_3.qasm"),
                 "--hardware", str(hwfile)]) == 1


def test_verify_tof3_exit_0():
    assert main(["verify", str(CORPUS_DIR / "tof_3.qasm")]) == 0


def test_verify_identity_circuit_exit_0(tmp_path):
    f = tmp_path / "idle.qasm"
    f.write_text("OPENQASM 2.0;\nqreg q[2];\nh q[0];\nh q[0];\n")
    assert main(["verify", str(f)]) == 0


def test_verify_too_wide_exit_1():
    assert main(["verify", str(CORPUS_DIR / "gf2_4_mult.qasm")]) == 1


def test_verify_detects_dropped_correction(tmp_path, monkeypatch):
    real = gadgets.expand_remote_cnot

    def sabotaged(ctrl, tgt, epr, bits):
        seq = real(ctrl, tgt, epr, bits)
        # drop the phase correction on the control
        from dqcc.circuits import GateKind
        return [g for g in seq if g.kind != GateKind.CC_Z]

    monkeypatch.setattr(gadgets, "expand_remote_cnot", sabotaged)
    f = tmp_path / "pair.qasm"
    f.write_text("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];\n")
    assert main(["verify", str(f)]) == 3
