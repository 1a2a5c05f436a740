"""Microcode decoding and mask-based qubit address resolution."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConflictingPairSelection, UnknownQOpcode
from ..isa import ChipTopology, InstantiationConfig, pair_mask_conflicts

# Micro-operation selection signal values.
SEL_NONE = 0b00
SEL_SRC = 0b01
SEL_TGT = 0b10
SEL_SINGLE = 0b11


@dataclass(frozen=True)
class MicroCode:
    """Q control store entry for one q_opcode."""

    mnemonic: str
    kind: str
    micro_ops: tuple[str, ...]  # subset of ("s", "src", "tgt", "meas")
    flag_select: int
    duration: int


def microcode_decode(config: InstantiationConfig, q_opcode: int) -> MicroCode:
    op = config.op_by_code(q_opcode)
    if op is None:
        raise UnknownQOpcode(f"q_opcode {q_opcode:#x} is not in the Q control store")
    micro = {"single": ("s",), "two_qubit": ("src", "tgt"), "measure": ("meas",), "qnop": ()}[op.kind]
    return MicroCode(op.mnemonic, op.kind, micro, op.flag_select, op.duration)


def resolve_opsel(topology: ChipTopology, mask: int, kind: str, check: bool = True) -> tuple[int, ...]:
    """Per-qubit 2-bit selection signals for a target-register value.

    Two-qubit masks use OR logic per qubit: the high bit ORs the edges on
    which the qubit is the target, the low bit those where it is the source.
    With ``check`` a mask touching any qubit through two edges is rejected.
    """
    n = topology.num_qubits
    if kind == "qnop":
        return (SEL_NONE,) * n
    if kind in ("single", "measure"):
        return tuple(SEL_SINGLE if mask >> i & 1 else SEL_NONE for i in range(n))
    if check:
        shared = pair_mask_conflicts(topology, mask)
        if shared:
            raise ConflictingPairSelection(f"pair mask {mask:#x} selects qubit(s) {shared} more than once")
    tgt, src = topology.target_edge_masks, topology.source_edge_masks
    return tuple((bool(mask & tgt[i]) << 1) | bool(mask & src[i]) for i in range(n))
