"""Small-scale statevector oracle with exhaustive measurement branching.

Measurements fork the state into explicit branches so every classically
controlled correction path is simulated literally. Branch counts grow as
2^measurements, which is exactly what the gadget-level checks need; the
equivalence checker additionally coalesces branches that have reconverged to
the same physical state once their classical bits are dead, keeping deep
compiled circuits tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, Gate, GateKind, MARKER_KINDS

MAX_QUBITS = 14
PRUNE_TOL = 1e-12


class SimulationError(ValueError):
    pass


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def _h() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


# Diagonal single-qubit gates as (d0, d1) pairs.
def _diag(kind: GateKind, params: tuple[float, ...]) -> tuple[complex, complex]:
    if kind == GateKind.RZ:
        theta = params[0]
        return (np.exp(-0.5j * theta), np.exp(0.5j * theta))
    if kind == GateKind.Z:
        return (1, -1)
    if kind == GateKind.S:
        return (1, 1j)
    if kind == GateKind.SDG:
        return (1, -1j)
    if kind == GateKind.T:
        return (1, np.exp(0.25j * math.pi))
    if kind == GateKind.TDG:
        return (1, np.exp(-0.25j * math.pi))
    raise SimulationError(f"not a diagonal gate: {kind.value}")


_DIAG_KINDS = frozenset({GateKind.RZ, GateKind.Z, GateKind.S, GateKind.SDG,
                         GateKind.T, GateKind.TDG})


@dataclass
class BranchState:
    """One measurement branch. `state` is unnormalized: its squared norm is
    the branch probability (per input column in batched mode)."""
    state: np.ndarray          # shape (2**n, batch)
    bits: dict[int, int] = field(default_factory=dict)

    @property
    def probability(self) -> np.ndarray:
        return np.sum(np.abs(self.state) ** 2, axis=0)

    def normalized(self) -> np.ndarray:
        norms = np.sqrt(self.probability)
        norms = np.where(norms < PRUNE_TOL, 1.0, norms)
        return self.state / norms


def _apply_1q_dense(state: np.ndarray, n: int, q: int, u: np.ndarray) -> None:
    pre, post = 1 << q, (1 << (n - q - 1)) * state.shape[1]
    v = state.reshape(pre, 2, post)
    v0 = u[0, 0] * v[:, 0, :] + u[0, 1] * v[:, 1, :]
    v[:, 1, :] = u[1, 0] * v[:, 0, :] + u[1, 1] * v[:, 1, :]
    v[:, 0, :] = v0


def _apply_diag(state: np.ndarray, n: int, q: int, d0: complex, d1: complex) -> None:
    pre, post = 1 << q, (1 << (n - q - 1)) * state.shape[1]
    v = state.reshape(pre, 2, post)
    if d0 != 1:
        v[:, 0, :] *= d0
    if d1 != 1:
        v[:, 1, :] *= d1


def _slice_index(n: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * (n + 1)  # trailing axis is the batch
    for axis, val in fixed.items():
        idx[axis] = val
    return tuple(idx)


def _apply_x(state: np.ndarray, n: int, q: int, controls: dict[int, int] | None = None) -> None:
    v = state.reshape((2,) * n + (-1,))
    fixed = dict(controls or {})
    i0 = _slice_index(n, {**fixed, q: 0})
    i1 = _slice_index(n, {**fixed, q: 1})
    tmp = v[i0].copy()
    v[i0] = v[i1]
    v[i1] = tmp


def _apply_z_controlled(state: np.ndarray, n: int, q: int) -> None:
    v = state.reshape((2,) * n + (-1,))
    v[_slice_index(n, {q: 1})] *= -1


class _Runner:
    def __init__(self, circuit: Circuit, merge: bool = False):
        if circuit.num_qubits > MAX_QUBITS:
            raise SimulationError(
                f"{circuit.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit simulator cap")
        for g in circuit.gates:
            if g.kind in MARKER_KINDS:
                raise SimulationError(f"cannot simulate marker gate {g.kind.value}")
        self.circuit = circuit
        self.n = circuit.num_qubits
        self.merge = merge
        # Bit liveness: a branch merge may only collapse branches whose still
        # readable bits agree. Bit b is live after gate i if some gate > i
        # conditions on it.
        self.live_after: list[frozenset[int]] = []
        live: set[int] = set()
        for g in reversed(circuit.gates):
            self.live_after.append(frozenset(live))
            if g.kind in (GateKind.CC_X, GateKind.CC_Z):
                live.add(g.bits[0])
        self.live_after.reverse()

    def initial_state(self, initial) -> np.ndarray:
        dim = 1 << self.n
        if initial is None:
            state = np.zeros((dim, 1), dtype=complex)
            state[0, 0] = 1.0
            return state
        if isinstance(initial, int):
            if not 0 <= initial < dim:
                raise SimulationError(f"basis index {initial} out of range")
            state = np.zeros((dim, 1), dtype=complex)
            state[initial, 0] = 1.0
            return state
        arr = np.asarray(initial, dtype=complex)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.shape[0] != dim:
            raise SimulationError(f"state has dimension {arr.shape[0]}, expected {dim}")
        return arr.copy()

    def run(self, initial=None) -> list[BranchState]:
        branches = [BranchState(self.initial_state(initial))]
        for i, gate in enumerate(self.circuit.gates):
            branches = self._step(branches, gate)
            if self.merge and gate.kind in (GateKind.MEASURE, GateKind.CC_X, GateKind.CC_Z):
                branches = self._merge(branches, self.live_after[i])
        return branches

    def _step(self, branches: list[BranchState], gate: Gate) -> list[BranchState]:
        n = self.n
        kind = gate.kind
        if kind == GateKind.BARRIER:
            return branches
        if kind == GateKind.MEASURE:
            out = []
            q, b = gate.qubits[0], gate.bits[0]
            for br in branches:
                v = br.state.reshape((2,) * n + (-1,))
                for outcome in (0, 1):
                    proj = np.zeros_like(br.state).reshape((2,) * n + (-1,))
                    sl = _slice_index(n, {q: outcome})
                    proj[sl] = v[sl]
                    proj = proj.reshape(br.state.shape)
                    if np.max(np.sum(np.abs(proj) ** 2, axis=0)) < PRUNE_TOL:
                        continue
                    bits = dict(br.bits)
                    bits[b] = outcome
                    out.append(BranchState(proj, bits))
            return out
        for br in branches:
            st = br.state
            if kind == GateKind.H:
                _apply_1q_dense(st, n, gate.qubits[0], _h())
            elif kind == GateKind.RX:
                _apply_1q_dense(st, n, gate.qubits[0], _rx(gate.params[0]))
            elif kind in _DIAG_KINDS:
                d0, d1 = _diag(kind, gate.params)
                _apply_diag(st, n, gate.qubits[0], d0, d1)
            elif kind == GateKind.X:
                _apply_x(st, n, gate.qubits[0])
            elif kind == GateKind.CX:
                c, t = gate.qubits
                _apply_x(st, n, t, {c: 1})
            elif kind == GateKind.CCX:
                a, b, t = gate.qubits
                _apply_x(st, n, t, {a: 1, b: 1})
            elif kind == GateKind.CC_X:
                if br.bits.get(gate.bits[0], 0) == 1:
                    _apply_x(st, n, gate.qubits[0])
            elif kind == GateKind.CC_Z:
                if br.bits.get(gate.bits[0], 0) == 1:
                    _apply_z_controlled(st, n, gate.qubits[0])
            else:
                raise SimulationError(f"unsupported gate kind {kind.value}")
        return branches

    @staticmethod
    def _parallel(a: BranchState, b: BranchState) -> bool:
        na = np.sqrt(a.probability)
        nb = np.sqrt(b.probability)
        dots = np.abs(np.sum(np.conj(a.state) * b.state, axis=0))
        lim = na * nb
        return bool(np.all(dots >= lim - 1e-10 * np.maximum(lim, 1e-30)))

    def _merge(self, branches: list[BranchState], live: frozenset[int]) -> list[BranchState]:
        if len(branches) < 2:
            return branches
        merged: list[BranchState] = []
        for br in branches:
            sig = tuple(sorted((b, br.bits.get(b, 0)) for b in live))
            hit = None
            for other in merged:
                osig = tuple(sorted((b, other.bits.get(b, 0)) for b in live))
                if sig == osig and self._parallel(other, br):
                    hit = other
                    break
            if hit is None:
                merged.append(br)
            else:
                # Same physical state and indistinguishable bit future: fold
                # the probability mass into the representative column-wise.
                pa, pb = hit.probability, br.probability
                scale = np.sqrt(np.where(pa < PRUNE_TOL, 1.0, (pa + pb) / np.maximum(pa, PRUNE_TOL)))
                dead = pa < PRUNE_TOL
                hit.state *= scale
                if np.any(dead):
                    hit.state[:, dead] = br.state[:, dead]
        return merged


def simulate(circuit: Circuit, initial=None) -> list[BranchState]:
    """Run with exhaustive measurement branching; zero-probability branches
    are pruned. Returns one BranchState per surviving branch."""
    return _Runner(circuit).run(initial)


def trim_idle_wires(circuit: Circuit, keep=()) -> tuple[Circuit, dict[int, int]]:
    """Drop wires no gate touches (except those in `keep`), remapping indices.
    Returns the smaller circuit and the old->new wire map."""
    used = set(keep)
    for g in circuit.gates:
        used.update(g.qubits)
    order = sorted(used)
    remap = {old: new for new, old in enumerate(order)}
    out = Circuit(len(order), circuit.num_bits)
    for g in circuit.gates:
        out.append(Gate(g.kind, tuple(remap[q] for q in g.qubits), g.params, g.bits))
    return out, remap


def _tomographic_products(k: int) -> list[np.ndarray]:
    """Six fixed single-axis product states on k qubits: |0..0>, |1..1>,
    |+..+>, |-..->, |+i..+i>, |-i..-i>."""
    r2 = 1 / math.sqrt(2)
    singles = [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([r2, r2], dtype=complex),
        np.array([r2, -r2], dtype=complex),
        np.array([r2, 1j * r2], dtype=complex),
        np.array([r2, -1j * r2], dtype=complex),
    ]
    out = []
    for s in singles:
        v = np.array([1.0], dtype=complex)
        for _ in range(k):
            v = np.kron(v, s)
        out.append(v)
    return out


def spanning_inputs(k: int) -> np.ndarray:
    """Input battery for equivalence checking: all 2^k computational basis
    states plus the 6 tomographic products, as columns."""
    dim = 1 << k
    cols = np.zeros((dim, dim + 6), dtype=complex)
    cols[:dim, :dim] = np.eye(dim)
    for i, v in enumerate(_tomographic_products(k)):
        cols[:, dim + i] = v
    return cols


def _embed_columns(cols: np.ndarray, n: int, wires: list[int]) -> np.ndarray:
    """Place k-qubit column states onto the given wires of an n-wire register,
    all other wires in |0>."""
    k = len(wires)
    batch = cols.shape[1]
    state = np.zeros(((1 << n), batch), dtype=complex)
    tensor = state.reshape((2,) * n + (batch,))
    src = cols.reshape((2,) * k + (batch,))
    # The sliced target block orders its axes by ascending wire index; source
    # axis j carries the state of wires[j], so transpose to match.
    idx: list = [0] * n + [slice(None)]
    for w in wires:
        idx[w] = slice(None)
    tensor[tuple(idx)] = src.transpose(*_axis_order(wires), k)
    return state


def _axis_order(wires: list[int]) -> list[int]:
    """Transpose order so that source axes land on ascending target wires."""
    ranks = sorted(range(len(wires)), key=lambda j: wires[j])
    return ranks


def _extract_columns(state: np.ndarray, n: int, wires: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of _embed_columns: slice the block where all non-`wires` axes
    are 0 and reorder axes to the logical wire order. Returns (reduced,
    residual mass outside the block, per column)."""
    batch = state.shape[1]
    tensor = state.reshape((2,) * n + (batch,))
    idx = [0] * n + [slice(None)]
    for w in wires:
        idx[w] = slice(None)
    block = tensor[tuple(idx)]  # axes ordered by ascending wire index
    ascending = sorted(wires)
    src_rank = [ascending.index(w) for w in wires]
    block = block.transpose(*src_rank, len(wires))
    reduced = block.reshape((1 << len(wires), batch))
    total = np.sum(np.abs(state) ** 2, axis=0)
    inside = np.sum(np.abs(reduced) ** 2, axis=0)
    return reduced, total - inside


@dataclass
class EquivalenceReport:
    equivalent: bool
    worst_fidelity: float
    failing_input: int | None = None
    failing_bits: dict[int, int] | None = None
    detail: str = ""


def equivalence_report(reference: Circuit, candidate: Circuit,
                       data_qubits=None, tol: float = 1e-9,
                       candidate_in_wires=None, candidate_out_wires=None) -> EquivalenceReport:
    """Check that every measurement branch of `candidate` acts on the data
    qubits like `reference` does, up to global phase, over the fixed spanning
    input set. `candidate` may use extra ancilla wires and classical bits;
    ancillas must start and end in |0>."""
    data = list(data_qubits) if data_qubits is not None else list(range(reference.num_qubits))
    k = len(data)
    c_in = list(candidate_in_wires) if candidate_in_wires is not None else list(data)
    c_out = list(candidate_out_wires) if candidate_out_wires is not None else list(c_in)

    cand, remap = trim_idle_wires(candidate, keep=set(c_in) | set(c_out))
    c_in = [remap[w] for w in c_in]
    c_out = [remap[w] for w in c_out]

    if any(g.kind == GateKind.MEASURE for g in reference.gates):
        raise SimulationError("reference circuit must be measurement-free")

    cols = spanning_inputs(k)
    ref_init = _embed_columns(cols, reference.num_qubits, data)
    ref_branches = _Runner(reference).run(ref_init)
    if len(ref_branches) != 1:
        raise SimulationError("reference circuit must be a single branch")
    ref_out, ref_resid = _extract_columns(ref_branches[0].state, reference.num_qubits, data)
    if float(np.max(ref_resid)) > tol:
        raise SimulationError("reference circuit leaks amplitude off the data qubits")

    cand_init = _embed_columns(cols, cand.num_qubits, c_in)
    branches = _Runner(cand, merge=True).run(cand_init)

    worst = 1.0
    total_mass = np.zeros(cols.shape[1])
    for br in branches:
        reduced, resid = _extract_columns(br.state, cand.num_qubits, c_out)
        mass = br.probability
        total_mass += mass
        bad = resid > tol * np.maximum(mass, 1.0)
        if np.any(bad):
            col = int(np.argmax(bad))
            return EquivalenceReport(False, 0.0, col, dict(br.bits),
                                     "amplitude left on ancilla/EPR wires")
        # branch fidelity per input column
        dots = np.abs(np.sum(np.conj(ref_out) * reduced, axis=0)) ** 2
        denom = np.sum(np.abs(ref_out) ** 2, axis=0) * np.maximum(
            np.sum(np.abs(reduced) ** 2, axis=0), PRUNE_TOL ** 2)
        live = mass > PRUNE_TOL
        fid = np.where(live, dots / np.maximum(denom, PRUNE_TOL ** 2), 1.0)
        wi = int(np.argmin(fid))
        if fid[wi] < worst:
            worst = float(fid[wi])
        if worst < 1 - tol:
            return EquivalenceReport(False, worst, wi, dict(br.bits),
                                     f"branch fidelity {worst:.3e} below 1-tol")
    if float(np.max(np.abs(total_mass - 1.0))) > 1e-9:
        return EquivalenceReport(False, worst, int(np.argmax(np.abs(total_mass - 1.0))),
                                 None, "branch probabilities do not sum to 1")
    return EquivalenceReport(True, worst)


def equivalent(reference: Circuit, candidate: Circuit, data_qubits=None, tol: float = 1e-9,
               candidate_in_wires=None, candidate_out_wires=None) -> bool:
    return equivalence_report(reference, candidate, data_qubits, tol,
                              candidate_in_wires, candidate_out_wires).equivalent
