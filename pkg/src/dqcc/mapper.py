"""Compiler core: global QPU assignment from the full interaction graph,
rolling-window re-partitioning, and greedy migrate-vs-remote decisions.

The local pass threads an assignment through consecutive time windows. Within
each window it re-partitions the active qubits (warm-started from the
incumbent placement), then moves a qubit only when the EPR cost of a teleport
is strictly beaten by the remote gates it saves. On architectures with no
spare data slots a move is realized as a pairwise exchange (two teleports)
with either an opposite-direction mover or an idle resident.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, GateKind, ScheduledCircuit
from .graphs import InteractionGraph, PartitionVector, circuit_graph, interaction_graph
from .hardware import Assignment, HardwareSpec
from .partition import SizeSpec, cut_cost, kl_refine, spectral_partition


class CapacityError(ValueError):
    pass


def _refined(graph: InteractionGraph, spec: SizeSpec,
             starts: list[PartitionVector]) -> PartitionVector:
    """KL-refine each start and keep the best result; ties keep the earliest
    start, which callers use to bias toward an incumbent."""
    best, best_cost = None, None
    for start in starts:
        refined = kl_refine(graph, start, spec)
        cost = cut_cost(graph, refined)
        if best_cost is None or cost < best_cost - 1e-9:
            best, best_cost = refined, cost
    return best


def _trivial_partition(n: int, sizes: tuple[int, ...]) -> PartitionVector:
    labels = np.zeros(n, dtype=int)
    cluster, used = 0, 0
    for v in range(n):
        while used >= sizes[cluster]:
            cluster += 1
            used = 0
        labels[v] = cluster
        used += 1
    return PartitionVector(labels, len(sizes))


def global_assign(circuit: Circuit, hw: HardwareSpec, seed: int = 0) -> Assignment:
    """Partition the full-circuit interaction graph across QPUs (spectral +
    Kernighan-Lin, with the identity split as a second refinement start so the
    result never loses to the trivial map), then give each qubit a
    seeded-random slot inside its QPU."""
    n = circuit.num_qubits
    if n > hw.total_data_capacity:
        raise CapacityError(
            f"circuit needs {n} data qubits, hardware provides {hw.total_data_capacity}")
    sizes = tuple(q.data_capacity for q in hw.qpus)
    graph = circuit_graph(circuit)
    spec = SizeSpec(sizes)
    starts = [spectral_partition(graph, spec), _trivial_partition(n, sizes)]
    part = _refined(graph, spec, starts)

    rng = random.Random(seed)
    assignment = Assignment(hw)
    for qpu_idx in range(len(hw.qpus)):
        members = [q for q in range(n) if part.labels[q] == qpu_idx]
        free = list(range(hw.qpus[qpu_idx].data_capacity))
        for q in members:
            slot = free.pop(rng.randrange(len(free)))
            assignment.placement[q] = (qpu_idx, slot)
    assignment.validate()
    return assignment


def make_windows(sched: ScheduledCircuit, dt: float) -> list[tuple[float, float]]:
    """Disjoint intervals [i*dt, (i+1)*dt) covering every gate start time."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not sched.circuit.gates:
        return []
    count = int(sched.max_start // dt) + 1
    return [(i * dt, (i + 1) * dt) for i in range(count)]


def _move_gain(wadj: np.ndarray, qpus: dict[int, int], q: int, dst: int) -> float:
    """Remote gates saved minus remote gates created if q alone moves to dst."""
    gain = 0.0
    src = qpus[q]
    row = wadj[q]
    for r, w in enumerate(row):
        if w == 0 or r == q or r not in qpus:
            continue
        before = qpus[r] != src
        after = qpus[r] != dst
        gain += w * (int(before) - int(after))
    return gain


def migration_rule(q: int, window_graph: InteractionGraph, current: dict[int, int],
                   proposed_qpu: int, capacity_free: bool = True) -> str:
    """Single-qubit migrate-vs-stay decision: migrate when the remote gates
    saved strictly exceed one teleport plus the remote gates newly created on
    the qubit's other neighbors, and the target has a free data slot."""
    if current[q] == proposed_qpu or not capacity_free:
        return "stay"
    gain = _move_gain(window_graph.weights, current, q, proposed_qpu)
    return "migrate" if gain > 1 else "stay"


@dataclass
class Migration:
    qubit: int
    src: tuple[int, int]
    dst: tuple[int, int]


@dataclass
class WindowPlan:
    interval: tuple[float, float]
    migrations: list[Migration]
    gate_indices: list[int]
    remote_gates: list[int]
    placement: dict[int, tuple[int, int]]
    inherited_remote: int

    @property
    def epr_used(self) -> int:
        return len(self.remote_gates) + len(self.migrations)


@dataclass
class MappedProgram:
    circuit: Circuit
    hw: HardwareSpec
    dt: float
    seed: int
    windows: list[WindowPlan]
    initial: Assignment
    final: Assignment
    tags: list[str] = field(default_factory=list)

    @property
    def teleport_count(self) -> int:
        return sum(len(w.migrations) for w in self.windows)

    @property
    def remote_count(self) -> int:
        return sum(len(w.remote_gates) for w in self.windows)

    @property
    def inter_qpu_total(self) -> int:
        return self.teleport_count + self.remote_count

    @property
    def epr_per_window(self) -> list[int]:
        return [w.epr_used for w in self.windows]

    def epr_budget_per_window(self) -> int:
        channels = sum(l.channels for l in self.hw.links)
        period = self.hw.durations.epr_generation_period
        return int(channels * np.ceil(self.dt / period))

    def throttle_violations(self) -> list[int]:
        budget = self.epr_budget_per_window()
        return [i for i, used in enumerate(self.epr_per_window) if used > budget]

    def annotated_circuit(self) -> Circuit:
        """Original gates with remote two-qubit gates replaced by remote-cx
        markers and teleport markers inserted at their window positions."""
        out = Circuit(self.circuit.num_qubits, self.circuit.num_bits)
        remote = {i for w in self.windows for i in w.remote_gates}
        by_first_gate: dict[int, list[Migration]] = {}
        for w in self.windows:
            if w.migrations:
                first = w.gate_indices[0] if w.gate_indices else len(self.circuit.gates)
                by_first_gate.setdefault(first, []).extend(w.migrations)
        for i, gate in enumerate(self.circuit.gates):
            for mig in by_first_gate.get(i, []):
                out.add(GateKind.TELEPORT, (mig.qubit,))
            if i in remote:
                out.add(GateKind.REMOTE_CX, gate.qubits)
            else:
                out.append(gate)
        for mig in by_first_gate.get(len(self.circuit.gates), []):
            out.add(GateKind.TELEPORT, (mig.qubit,))
        return out


def _window_weight_matrix(sched: ScheduledCircuit, window: tuple[float, float]) -> np.ndarray:
    return interaction_graph(sched, window).weights


def _orient_to_incumbent(labels: np.ndarray, active: list[int],
                         cur: dict[int, int], avail: tuple[int, int]) -> np.ndarray:
    """Pick the labeling orientation (as-is or mirrored) that fits capacity
    and disagrees with the incumbent on fewer qubits; ties keep as-is."""
    mirrored = 1 - labels
    def fits(lbl):
        return (int(np.sum(lbl == 0)) <= avail[0]) and (int(np.sum(lbl == 1)) <= avail[1])
    def moves(lbl):
        return sum(1 for i, q in enumerate(active) if lbl[i] != cur[q])
    if not fits(mirrored):
        return labels
    if not fits(labels):
        return mirrored
    return mirrored if moves(mirrored) < moves(labels) else labels


def local_optimize(sched: ScheduledCircuit, hw: HardwareSpec, init: Assignment,
                   dt: float, seed: int = 0) -> MappedProgram:
    """Rolling-window local pass. Never returns a plan with more interconnect
    uses than the static global assignment: if windowed migration ends up
    worse in total, the zero-migration plan is emitted instead."""
    if len(hw.qpus) != 2:
        raise NotImplementedError(
            "the windowed local pass targets two-QPU hardware; k-way global "
            "assignment is available but not window-optimized")
    circuit = sched.circuit
    windows = make_windows(sched, dt)
    rng = random.Random(seed ^ 0x5EED)

    plan = _windowed_plan(sched, hw, init, dt, windows, rng)
    static = _static_plan(sched, hw, init, dt, windows)
    chosen = plan if plan.inter_qpu_total <= static.inter_qpu_total else static
    chosen.tags = _tags_for(circuit, chosen)
    return chosen


def _bucket_gates(sched: ScheduledCircuit, windows) -> list[list[int]]:
    buckets = [[] for _ in windows]
    if not windows:
        return buckets
    dt = windows[0][1] - windows[0][0]
    for i, t in enumerate(sched.start_times):
        buckets[int(t // dt)].append(i)
    return buckets


def _remote_indices(circuit: Circuit, indices, qpus: dict[int, int]) -> list[int]:
    out = []
    for i in indices:
        g = circuit.gates[i]
        if g.kind == GateKind.CX and qpus[g.qubits[0]] != qpus[g.qubits[1]]:
            out.append(i)
    return out


def _static_plan(sched, hw, init, dt, windows) -> MappedProgram:
    circuit = sched.circuit
    qpus = init.qpu_map()
    buckets = _bucket_gates(sched, windows)
    plans = []
    for interval, indices in zip(windows, buckets):
        remote = _remote_indices(circuit, indices, qpus)
        plans.append(WindowPlan(interval, [], indices, remote,
                                dict(init.placement), len(remote)))
    return MappedProgram(circuit, hw, dt, 0, plans, init.copy(), init.copy())


def _windowed_plan(sched, hw, init, dt, windows, rng) -> MappedProgram:
    circuit = sched.circuit
    assignment = init.copy()
    buckets = _bucket_gates(sched, windows)
    caps = tuple(q.data_capacity for q in hw.qpus)
    plans: list[WindowPlan] = []

    for interval, indices in zip(windows, buckets):
        wadj = _window_weight_matrix(sched, interval)
        active = sorted({q for i in indices
                         for q in circuit.gates[i].qubits
                         if circuit.gates[i].kind != GateKind.BARRIER})
        cur = assignment.qpu_map()
        inherited = len(_remote_indices(circuit, indices, cur))
        migrations: list[Migration] = []

        if active and any(wadj[q].any() for q in active):
            proposal = _window_proposal(wadj, active, cur, assignment, caps)
            migrations = _greedy_migrations(
                wadj, active, proposal, assignment, rng)

        cur = assignment.qpu_map()
        remote = _remote_indices(circuit, indices, cur)
        plans.append(WindowPlan(interval, migrations, indices, remote,
                                dict(assignment.placement), inherited))

    return MappedProgram(circuit, hw, dt, 0, plans, init.copy(), assignment.copy())


def _window_proposal(wadj, active, cur, assignment: Assignment, caps) -> dict[int, int]:
    """Partition the window-active qubits into QPUs, warm-started from the
    incumbent placement. Full QPU capacities are used: idle residents do not
    block a proposal, since the migration pass can displace them (at teleport
    cost) when doing so actually pays."""
    sub = InteractionGraph(wadj[np.ix_(active, active)])
    spec = SizeSpec(caps)
    incumbent = PartitionVector(np.array([cur[q] for q in active]), 2)
    starts = [incumbent]
    if sub.n >= 2:
        starts.append(spectral_partition(sub, spec))
    best = _refined(sub, spec, starts)
    labels = _orient_to_incumbent(best.labels, active, cur, caps)
    return {q: int(labels[i]) for i, q in enumerate(active)}


def _greedy_migrations(wadj, active, proposal, assignment: Assignment,
                       rng) -> list[Migration]:
    """Apply profitable moves in descending-benefit order. Moves are single
    teleports into free slots when available, otherwise pairwise exchanges
    (two teleports) with an opposite mover or an idle resident."""
    migrations: list[Migration] = []
    active_set = set(active)

    def qpus():
        return assignment.qpu_map()

    while True:
        cur = qpus()
        movers = [q for q in active if proposal[q] != cur[q]]
        if not movers:
            break
        best = None  # (net, order_rank, key, action)
        for q in movers:
            dst = proposal[q]
            gain = _move_gain(wadj, cur, q, dst)
            if assignment.free_slots(dst):
                net = gain - 1
                cand = (net, 0, (q,), ("single", q, dst))
                if best is None or _better(cand, best):
                    best = cand
            # pair with an opposite-direction mover
            for r in movers:
                if r <= q or proposal[r] != cur[q] or cur[r] != dst:
                    continue
                joint = gain + _move_gain(wadj, cur, r, cur[q]) - 2 * wadj[q, r]
                cand = (joint - 2, 1, (q, r), ("pair", q, r))
                if best is None or _better(cand, best):
                    best = cand
            # pair with an idle resident of the target QPU
            idle = [r for r, (p, _) in sorted(assignment.placement.items())
                    if p == dst and r not in active_set]
            if idle:
                cand = (gain - 2, 2, (q, idle[0]), ("evict", q, idle[0]))
                if best is None or _better(cand, best):
                    best = cand
        if best is None or best[0] <= 0:
            break
        _, _, _, action = best
        if action[0] == "single":
            _, q, dst = action
            free = assignment.free_slots(dst)
            slot = free[rng.randrange(len(free))]
            src = assignment.placement[q]
            assignment.placement[q] = (dst, slot)
            migrations.append(Migration(q, src, (dst, slot)))
        else:
            _, q, r = action
            sq, sr = assignment.placement[q], assignment.placement[r]
            assignment.placement[q], assignment.placement[r] = sr, sq
            migrations.append(Migration(q, sq, sr))
            migrations.append(Migration(r, sr, sq))
    return migrations


def _better(cand, best) -> bool:
    if cand[0] != best[0]:
        return cand[0] > best[0]
    if cand[1] != best[1]:
        return cand[1] < best[1]
    return cand[2] < best[2]


def _tags_for(circuit: Circuit, mp: MappedProgram) -> list[str]:
    remote = {i for w in mp.windows for i in w.remote_gates}
    tags = []
    for i, g in enumerate(circuit.gates):
        if g.kind == GateKind.CX:
            tags.append("remote" if i in remote else "local")
        else:
            tags.append("local" if g.qubits else "other")
    return tags
