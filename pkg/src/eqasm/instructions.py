"""Instruction AST.

One frozen dataclass per instruction form. Registers are stored as integer
addresses; ``str(instr)`` renders the canonical assembly text, which the
parser accepts back unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Cmp:
    rs: int
    rt: int

    def __str__(self):
        return f"CMP R{self.rs}, R{self.rt}"


@dataclass(frozen=True)
class Br:
    flag: str
    target: Union[str, int]  # label, or signed word offset from this instruction

    def __str__(self):
        return f"BR {self.flag}, {self.target}"


@dataclass(frozen=True)
class Fbr:
    flag: str
    rd: int

    def __str__(self):
        return f"FBR {self.flag}, R{self.rd}"


@dataclass(frozen=True)
class Ldi:
    rd: int
    imm: int

    def __str__(self):
        return f"LDI R{self.rd}, {self.imm}"


@dataclass(frozen=True)
class Ldui:
    rd: int
    imm: int
    rs: int

    def __str__(self):
        return f"LDUI R{self.rd}, {self.imm}, R{self.rs}"


@dataclass(frozen=True)
class Ld:
    rd: int
    rt: int
    imm: int

    def __str__(self):
        return f"LD R{self.rd}, R{self.rt}({self.imm})"


@dataclass(frozen=True)
class St:
    rs: int
    rt: int
    imm: int

    def __str__(self):
        return f"ST R{self.rs}, R{self.rt}({self.imm})"


@dataclass(frozen=True)
class Fmr:
    rd: int
    qubit: int

    def __str__(self):
        return f"FMR R{self.rd}, Q{self.qubit}"


@dataclass(frozen=True)
class Alu:
    """AND, OR, XOR, ADD or SUB."""

    op: str
    rd: int
    rs: int
    rt: int

    def __str__(self):
        return f"{self.op} R{self.rd}, R{self.rs}, R{self.rt}"


@dataclass(frozen=True)
class Not:
    rd: int
    rt: int

    def __str__(self):
        return f"NOT R{self.rd}, R{self.rt}"


@dataclass(frozen=True)
class QWait:
    imm: int

    def __str__(self):
        return f"QWAIT {self.imm}"


@dataclass(frozen=True)
class QWaitR:
    rs: int

    def __str__(self):
        return f"QWAITR R{self.rs}"


@dataclass(frozen=True)
class Smis:
    sd: int
    qubits: tuple[int, ...]

    def __str__(self):
        return f"SMIS S{self.sd}, {{{', '.join(map(str, self.qubits))}}}"


@dataclass(frozen=True)
class Smit:
    td: int
    pairs: tuple[tuple[int, int], ...]

    def __str__(self):
        body = ", ".join(f"({a}, {b})" for a, b in self.pairs)
        return f"SMIT T{self.td}, {{{body}}}"


@dataclass(frozen=True)
class QOp:
    """One slot of a bundle. ``reg`` is None for QNOP."""

    name: str
    reg: int | None = None
    reg_kind: str = "S"

    def __str__(self):
        return self.name if self.reg is None else f"{self.name} {self.reg_kind}{self.reg}"


@dataclass(frozen=True)
class WaitSlot:
    """A QWAIT carried inside a bundle slot (only with ``bundle_wait_slot``)."""

    cycles: int

    def __str__(self):
        return f"QWAIT {self.cycles}"


@dataclass(frozen=True)
class Bundle:
    pi: int
    ops: tuple[Union[QOp, WaitSlot], ...] = field(default_factory=tuple)

    def __str__(self):
        return f"{self.pi}, " + " | ".join(str(op) for op in self.ops)

    @property
    def wait(self) -> int:
        return sum(op.cycles for op in self.ops if isinstance(op, WaitSlot))


Instruction = Union[Cmp, Br, Fbr, Ldi, Ldui, Ld, St, Fmr, Alu, Not, QWait, QWaitR, Smis, Smit, Bundle]

QUANTUM_TYPES = (QWait, QWaitR, Smis, Smit, Bundle)


def mnemonic_of(instr) -> str:
    if isinstance(instr, Alu):
        return instr.op
    if isinstance(instr, Bundle):
        return "BUNDLE"
    return type(instr).__name__.upper()
