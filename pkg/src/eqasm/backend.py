"""Ideal state-vector backend.

Qubit ``i`` is bit ``i`` of the basis-state index. Rotations follow
``R_n(theta) = exp(-i theta n.sigma / 2)``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import QubitOutOfRange, SameQubit, ZeroProbabilityForcedOutcome

MAX_QUBITS = 20

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def rotation(axis, angle_deg: float) -> np.ndarray:
    nx, ny, nz = axis
    theta = math.radians(angle_deg)
    generator = nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z
    return math.cos(theta / 2) * IDENTITY - 1j * math.sin(theta / 2) * generator


def op_unitary(opdef) -> np.ndarray:
    """2x2 unitary of a configured single-qubit operation."""
    return rotation(opdef.axis, opdef.angle)


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2, insensitive to global phase."""
    return float(abs(np.vdot(psi, phi)) ** 2)


class QuantumState:
    def __init__(self, n: int, seed: int | None = 0, max_qubits: int = MAX_QUBITS):
        if not 0 < n <= max_qubits:
            raise QubitOutOfRange(f"{n} qubits outside 1..{max_qubits}")
        self.n = n
        self.amplitudes = np.zeros(1 << n, dtype=complex)
        self.amplitudes[0] = 1.0
        self.rng = np.random.default_rng(seed)

    def _check(self, *qubits):
        for q in qubits:
            if not 0 <= q < self.n:
                raise QubitOutOfRange(f"qubit {q} outside 0..{self.n - 1}")

    def _tensor(self):
        # axis k of the reshaped tensor is qubit n-1-k
        return self.amplitudes.reshape([2] * self.n)

    def apply_single(self, qubit: int, unitary: np.ndarray) -> None:
        self._check(qubit)
        axis = self.n - 1 - qubit
        psi = np.moveaxis(self._tensor(), axis, 0)
        psi = np.tensordot(unitary, psi, axes=([1], [0]))
        self.amplitudes = np.moveaxis(psi, 0, axis).reshape(-1)

    def _pair_index(self, a: int, b: int):
        idx = np.arange(1 << self.n)
        return (idx >> a) & 1, (idx >> b) & 1

    def apply_cz(self, src: int, tgt: int) -> None:
        self._check(src, tgt)
        if src == tgt:
            raise SameQubit(f"CZ on qubit {src} twice")
        a, b = self._pair_index(src, tgt)
        self.amplitudes = np.where((a & b).astype(bool), -self.amplitudes, self.amplitudes)

    def apply_cnot(self, control: int, target: int) -> None:
        self._check(control, target)
        if control == target:
            raise SameQubit(f"CNOT on qubit {control} twice")
        idx = np.arange(1 << self.n)
        flipped = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
        self.amplitudes = self.amplitudes[flipped]

    def probability_one(self, qubit: int) -> float:
        self._check(qubit)
        idx = np.arange(1 << self.n)
        return float(np.sum(np.abs(self.amplitudes[((idx >> qubit) & 1).astype(bool)]) ** 2))

    def measure(self, qubit: int, forced: int | None = None) -> tuple[int, float]:
        """Projective Z measurement; returns ``(bit, p1)`` with p1 taken before collapse.

        ``forced`` post-selects the given outcome.
        """
        p1 = self.probability_one(qubit)
        if forced is None:
            bit = int(self.rng.random() < p1)
        else:
            bit = int(forced)
            if (p1 if bit else 1.0 - p1) < 1e-12:
                raise ZeroProbabilityForcedOutcome(f"outcome {bit} on qubit {qubit} has probability 0")
        idx = np.arange(1 << self.n)
        keep = ((idx >> qubit) & 1) == bit
        self.amplitudes = np.where(keep, self.amplitudes, 0)
        self.amplitudes /= math.sqrt(p1 if bit else 1.0 - p1)
        return bit, p1

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def dump(self) -> str:
        """``index real imag`` per line."""
        return "".join(f"{i} {a.real:.12e} {a.imag:.12e}\n" for i, a in enumerate(self.amplitudes))
