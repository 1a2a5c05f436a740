"""Scheduled benchmark circuits for instruction-count exploration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..backend import IDENTITY, rotation
from ..isa import ChipTopology, ring_topology, surface7_topology

SINGLE_DURATION = 1
TWO_QUBIT_DURATION = 2

# Single-qubit Clifford group as sequences of x/y rotations (applied left to right).
# 45 primitives over 24 elements: 1.875 per Clifford on average.
CLIFFORD_DECOMPOSITIONS: tuple[tuple[str, ...], ...] = (
    # Pauli
    ("I",), ("X",), ("Y",), ("Y", "X"),
    # 2pi/3 rotations
    ("X90", "Y90"), ("X90", "Ym90"), ("Xm90", "Y90"), ("Xm90", "Ym90"),
    ("Y90", "X90"), ("Y90", "Xm90"), ("Ym90", "X90"), ("Ym90", "Xm90"),
    # pi/2 rotations
    ("X90",), ("Xm90",), ("Y90",), ("Ym90",),
    ("Xm90", "Y90", "X90"), ("Xm90", "Ym90", "X90"),
    # Hadamard-like
    ("X", "Y90"), ("X", "Ym90"), ("Y", "X90"), ("Y", "Xm90"),
    ("X90", "Y90", "X90"), ("Xm90", "Y90", "Xm90"),
)

_PRIMITIVES = {
    "I": ((1, 0, 0), 0), "X": ((1, 0, 0), 180), "Y": ((0, 1, 0), 180),
    "X90": ((1, 0, 0), 90), "Xm90": ((1, 0, 0), -90), "Y90": ((0, 1, 0), 90), "Ym90": ((0, 1, 0), -90),
}


def primitive_unitary(name: str) -> np.ndarray:
    axis, angle = _PRIMITIVES[name]
    return rotation(axis, angle)


def sequence_unitary(gates) -> np.ndarray:
    u = IDENTITY
    for g in gates:
        u = primitive_unitary(g) @ u
    return u


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(a.reshape(-1), b.reshape(-1))) / 2 - 1) < tol


CLIFFORD_UNITARIES = tuple(sequence_unitary(seq) for seq in CLIFFORD_DECOMPOSITIONS)


def clifford_index(u: np.ndarray) -> int:
    for i, c in enumerate(CLIFFORD_UNITARIES):
        if same_up_to_phase(u, c):
            return i
    raise ValueError("not a Clifford")


@dataclass(frozen=True)
class Gate:
    start: int
    name: str
    qubits: tuple[int, ...]  # (q,) or (src, tgt)


@dataclass
class ScheduledCircuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    topology: ChipTopology | None = None
    name: str = ""

    def __post_init__(self):
        self.gates.sort(key=lambda g: (g.start, g.qubits))

    @property
    def two_qubit_fraction(self) -> float:
        return sum(len(g.qubits) == 2 for g in self.gates) / max(1, len(self.gates))

    def points(self) -> list[tuple[int, list[Gate]]]:
        """Gates grouped by start cycle, in time order."""
        out: list[tuple[int, list[Gate]]] = []
        for g in self.gates:
            if out and out[-1][0] == g.start:
                out[-1][1].append(g)
            else:
                out.append((g.start, [g]))
        return out

    def gates_on(self, qubit: int) -> list[Gate]:
        return [g for g in self.gates if qubit in g.qubits]


def rb_like(num_cliffords: int = 4096, num_qubits: int = 7, seed: int = 0,
            recovery: bool = True) -> ScheduledCircuit:
    """Independent back-to-back random Clifford streams, one per qubit."""
    rng = np.random.default_rng(seed)
    gates = []
    for q in range(num_qubits):
        idx = rng.integers(0, len(CLIFFORD_DECOMPOSITIONS), size=num_cliffords)
        seq: list[str] = []
        total = IDENTITY
        for i in idx:
            seq.extend(CLIFFORD_DECOMPOSITIONS[i])
            total = CLIFFORD_UNITARIES[i] @ total
        if recovery:
            seq.extend(CLIFFORD_DECOMPOSITIONS[clifford_index(total.conj().T)])
        gates.extend(Gate(t * SINGLE_DURATION, g, (q,)) for t, g in enumerate(seq))
    return ScheduledCircuit(num_qubits, gates, surface7_topology(), "rb")


def parallel_like(layers: int = 2000, seed: int = 0, two_qubit_fraction: float = 0.005) -> ScheduledCircuit:
    """Layered circuit on the 7-qubit chip, mostly uniform single-qubit layers.

    Each layer applies one rotation to every qubit; with probability chosen to
    hit ``two_qubit_fraction`` a layer instead puts a CZ on one chip edge while
    the remaining qubits idle.
    """
    topo = surface7_topology()
    n = topo.num_qubits
    rng = np.random.default_rng(seed)
    names = ["X90", "Y90", "Xm90", "Ym90", "X", "Y"]
    # per-layer probability p of a CZ layer: p / (p + (1 - p) * n) = fraction
    f = two_qubit_fraction
    p = f * n / (1 - f + f * n) if f > 0 else 0.0
    gates, t = [], 0
    for _ in range(layers):
        if rng.random() < p:
            src, tgt = topo.edges[rng.integers(0, topo.num_edges)]
            gates.append(Gate(t, "CZ", (src, tgt)))
            t += TWO_QUBIT_DURATION
        else:
            name = names[rng.integers(0, len(names))]
            gates.extend(Gate(t, name, (q,)) for q in range(n))
            t += SINGLE_DURATION
    return ScheduledCircuit(n, gates, topo, "parallel")


def sequential_like(num_gates: int = 3000, num_qubits: int = 8, seed: int = 0,
                    two_qubit_fraction: float = 0.39, locality: float = 0.97) -> ScheduledCircuit:
    """Dependency-chained circuit on a qubit ring, scheduled as soon as possible.

    Each gate touches, with probability ``locality``, a qubit of the previous
    gate, which serializes most of the circuit. The number of two-qubit gates
    is exactly ``round(two_qubit_fraction * num_gates)``.
    """
    topo = ring_topology(num_qubits)
    rng = np.random.default_rng(seed)
    names = ["X", "Y", "X90", "Y90", "Xm90", "Ym90"]
    n2 = round(two_qubit_fraction * num_gates)
    kinds = np.zeros(num_gates, dtype=bool)
    kinds[rng.choice(num_gates, size=n2, replace=False)] = True
    ready = [0] * num_qubits
    prev: tuple[int, ...] = (0,)
    gates = []
    for is_two in kinds:
        anchor = int(prev[rng.integers(0, len(prev))]) if rng.random() < locality else int(rng.integers(0, num_qubits))
        if is_two:
            other = (anchor + (1 if rng.random() < 0.5 else -1)) % num_qubits
            pair = (anchor, other) if rng.random() < 0.5 else (other, anchor)
            start = max(ready[pair[0]], ready[pair[1]])
            gates.append(Gate(start, "CZ", pair))
            for q in pair:
                ready[q] = start + TWO_QUBIT_DURATION
            prev = pair
        else:
            start = ready[anchor]
            gates.append(Gate(start, names[rng.integers(0, len(names))], (anchor,)))
            ready[anchor] = start + SINGLE_DURATION
            prev = (anchor,)
    return ScheduledCircuit(num_qubits, gates, topo, "sequential")


BENCHMARKS = {"rb": rb_like, "parallel": parallel_like, "sequential": sequential_like}


def generate_benchmark(kind: str, seed: int = 0, **params) -> ScheduledCircuit:
    aliases = {"rb_like": "rb", "parallel_like": "parallel", "sequential_like": "sequential"}
    kind = aliases.get(kind, kind)
    if kind not in BENCHMARKS:
        raise ValueError(f"unknown benchmark {kind!r}; choose from {sorted(BENCHMARKS)}")
    return BENCHMARKS[kind](seed=seed, **params)
