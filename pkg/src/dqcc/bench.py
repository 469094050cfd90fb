"""Compilation pipeline driver and benchmark report assembly.

A report record captures everything needed to reproduce a run: seed, window
length, hardware fingerprint, the deterministic baseline counts, and the
compiled-program metrics under both counting conventions (remote operations
as single logical units, and physical cx totals after gadget expansion).
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .circuits import (Circuit, count_inter_qpu, count_two_qubit,
                       decompose_to_basis, schedule_asap)
from .corpusgen import trivial_qpu_map
from .gadgets import ExpandedProgram, expand_program
from .graphs import cheeger_screen, InteractionGraph
from .hardware import Assignment, HardwareSpec, default_hardware
from .mapper import MappedProgram, global_assign, local_optimize
from .qasm import parse_qasm

REPORT_SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "name", "num_qubits", "seed", "dt",
    "base_total_2q", "base_interqpu_trivial",
    "global_interqpu", "local_interqpu",
    "local_total_2q_logical", "local_total_2q_expanded",
    "epr_consumed", "teleports", "compile_runtime_seconds", "hardware",
]


@dataclass
class CompileResult:
    circuit: Circuit
    decomposed: Circuit
    hw: HardwareSpec
    global_assignment: Assignment
    mapped: MappedProgram
    expanded: ExpandedProgram
    record: dict


def expanded_cx_count(expanded: Circuit) -> int:
    return count_two_qubit(expanded)


def compile_circuit(circuit: Circuit, hw: HardwareSpec | None = None,
                    dt: float | None = None, seed: int = 0) -> CompileResult:
    """Full pipeline: lower, schedule, global assign, window-optimize, expand.

    `hw` defaults to the two-cluster architecture sized for the circuit; `dt`
    defaults to the hardware's EPR generation period.
    """
    hw = hw or default_hardware(circuit.num_qubits)
    dt = dt if dt is not None else hw.durations.epr_generation_period

    t0 = time.perf_counter()
    decomposed = decompose_to_basis(circuit)
    sched = schedule_asap(decomposed, hw.durations)
    init = global_assign(decomposed, hw, seed)
    mapped = local_optimize(sched, hw, init, dt, seed)
    expanded = expand_program(mapped, hw)
    runtime = time.perf_counter() - t0

    base_total = count_two_qubit(decomposed)
    trivial = trivial_qpu_map(circuit.num_qubits)
    record = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "num_qubits": circuit.num_qubits,
        "seed": seed,
        "dt": dt,
        "base_total_2q": base_total,
        "base_interqpu_trivial": count_inter_qpu(decomposed, trivial),
        "global_interqpu": count_inter_qpu(decomposed, init.qpu_map()),
        "local_interqpu": mapped.inter_qpu_total,
        "local_remote_gates": mapped.remote_count,
        "teleports": mapped.teleport_count,
        "local_total_2q_logical": base_total + mapped.teleport_count,
        "local_total_2q_expanded": expanded_cx_count(expanded.circuit),
        "epr_consumed": expanded.epr_events,
        "epr_per_window": mapped.epr_per_window,
        "throttle_violations": mapped.throttle_violations(),
        "compile_runtime_seconds": runtime,
        "hardware": hw.fingerprint(),
    }
    return CompileResult(circuit, decomposed, hw, init, mapped, expanded, record)


def hardware_suitability(hw: HardwareSpec, threshold: float = 1.0):
    """Screen the coupling topology: all-to-all inside each QPU plus one edge
    per interconnect channel between paired reservoir slots."""
    import numpy as np
    n = hw.total_wires
    w = np.zeros((n, n))
    for qi in range(len(hw.qpus)):
        base = hw.wire_base(qi)
        size = hw.qpus[qi].data_capacity + hw.qpus[qi].epr_slots
        for a in range(base, base + size):
            for b in range(a + 1, base + size):
                w[a, b] = w[b, a] = 1.0
    for link in hw.links:
        ia, ib = hw.qpu_index(link.qpu_a), hw.qpu_index(link.qpu_b)
        pairs = min(link.channels, hw.qpus[ia].epr_slots, hw.qpus[ib].epr_slots)
        for s in range(pairs):
            a, b = hw.epr_wire(ia, s), hw.epr_wire(ib, s)
            w[a, b] = w[b, a] = link.channels / pairs
    return cheeger_screen(InteractionGraph(w), k=len(hw.qpus), threshold=threshold)


@dataclass
class BenchRecord:
    name: str
    records: list[dict] = field(default_factory=list)
    error: str | None = None

    def aggregate(self) -> dict:
        if not self.records:
            return {"name": self.name, "error": self.error}
        base = self.records[0]
        glob = [r["global_interqpu"] for r in self.records]
        loc = [r["local_interqpu"] for r in self.records]
        agg = {
            "name": self.name,
            "num_qubits": base["num_qubits"],
            "base_total_2q": base["base_total_2q"],
            "base_interqpu_trivial": base["base_interqpu_trivial"],
            "global_interqpu_mean": statistics.mean(glob),
            "global_interqpu_std": statistics.stdev(glob) if len(glob) > 1 else 0.0,
            "local_interqpu_mean": statistics.mean(loc),
            "local_interqpu_std": statistics.stdev(loc) if len(loc) > 1 else 0.0,
            "runs": self.records,
        }
        return agg


def bench_circuit(name: str, text: str, hw: HardwareSpec | None,
                  dt: float | None, seeds: list[int]) -> BenchRecord:
    rec = BenchRecord(name)
    try:
        circuit = parse_qasm(text)
    except Exception as exc:  # parse failures are per-circuit, not fatal
        rec.error = f"parse error: {exc}"
        return rec
    for seed in seeds:
        try:
            result = compile_circuit(circuit, hw, dt, seed)
        except Exception as exc:
            rec.error = f"compile error: {exc}"
            return rec
        entry = {"name": name, **result.record}
        rec.records.append(entry)
    return rec


def records_to_csv(records: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join(str(r.get(c, "")) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"
