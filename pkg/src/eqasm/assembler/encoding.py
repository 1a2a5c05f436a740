"""Binary encoding of split, legalized programs.

Word layouts (bit 31 is the format bit; for 64-bit instantiations the format
bit is bit 63 and single-format words keep the 32-bit layout in the low bits)::

    SMIS    0 | opcode:6 | Sd:5 | unused | qubit mask
    SMIT    0 | opcode:6 | Td:5 | unused | pair mask
    QWAIT   0 | opcode:6 | unused:5 | imm:20
    QWAITR  0 | opcode:6 | unused:5 | Rs:5 | unused:15
    LDI     0 | opcode:6 | Rd:5 | imm:20 (signed)
    BR      0 | opcode:6 | flag:5 | offset:20 (signed, words)
    LDUI    0 | opcode:6 | Rd:5 | Rs:5 | imm:15
    others  0 | opcode:6 | Rd:5 | Rs:5 | Rt:5 | imm:10
    bundle  1 | (q_opcode:9 | Si/Ti:5) x w | unused | PI

In the generic layout LD/ST take a signed 10-bit offset, FBR stores the flag
code and FMR the qubit address in the imm field.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..errors import ConfigHashMismatch, DecodeError, EqasmError, ImmediateOverflow, UnknownOpcode
from ..instructions import (Alu, Br, Bundle, Cmp, Fbr, Fmr, Ld, Ldi, Ldui, Not, QOp, QWait, QWaitR,
                            Smis, Smit, St, WaitSlot, mnemonic_of)
from ..isa import FLAG_CODES, FLAGS, InstantiationConfig, mask_to_pair_list, mask_to_qubits, \
    pair_list_to_mask, qubits_to_mask
from .program import Program

OPC, RD, RS, RT = 25, 20, 15, 10
MAGIC = b"EQSM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHII")


def _unsigned(value, bits, what):
    if not 0 <= value < (1 << bits):
        raise ImmediateOverflow(f"{what}: {value} does not fit {bits} unsigned bits")
    return value


def _signed(value, bits, what):
    if not -(1 << (bits - 1)) <= value < (1 << (bits - 1)):
        raise ImmediateOverflow(f"{what}: {value} does not fit {bits} signed bits")
    return value & ((1 << bits) - 1)


def _sext(value, bits):
    return value - (1 << bits) if value >> (bits - 1) & 1 else value


def _field(word, shift, bits):
    return (word >> shift) & ((1 << bits) - 1)


def encode_instruction(instr, config: InstantiationConfig) -> int:
    ops = config.classical_opcodes
    if isinstance(instr, Bundle):
        return _encode_bundle(instr, config)
    word = ops[mnemonic_of(instr)] << OPC
    if isinstance(instr, Ldi):
        word |= instr.rd << RD | _signed(instr.imm, 20, "LDI immediate")
    elif isinstance(instr, Ldui):
        word |= instr.rd << RD | instr.rs << RS | _unsigned(instr.imm, 15, "LDUI immediate")
    elif isinstance(instr, Ld):
        word |= instr.rd << RD | instr.rt << RT | _signed(instr.imm, 10, "LD offset")
    elif isinstance(instr, St):
        word |= instr.rs << RS | instr.rt << RT | _signed(instr.imm, 10, "ST offset")
    elif isinstance(instr, Fbr):
        word |= instr.rd << RD | FLAG_CODES[instr.flag]
    elif isinstance(instr, Fmr):
        word |= instr.rd << RD | _unsigned(instr.qubit, 10, "FMR qubit")
    elif isinstance(instr, Cmp):
        word |= instr.rs << RS | instr.rt << RT
    elif isinstance(instr, Br):
        if not isinstance(instr.target, int):
            raise EqasmError(f"unresolved branch target {instr.target!r}")
        word |= FLAG_CODES[instr.flag] << RD | _signed(instr.target, 20, "BR offset")
    elif isinstance(instr, Alu):
        word |= instr.rd << RD | instr.rs << RS | instr.rt << RT
    elif isinstance(instr, Not):
        word |= instr.rd << RD | instr.rt << RT
    elif isinstance(instr, QWait):
        word |= _unsigned(instr.imm, config.qwait_imm_width, "QWAIT immediate")
    elif isinstance(instr, QWaitR):
        word |= instr.rs << RS
    elif isinstance(instr, Smis):
        word |= instr.sd << RD | _unsigned(qubits_to_mask(instr.qubits), config.qubit_mask_width, "SMIS mask")
    elif isinstance(instr, Smit):
        mask = pair_list_to_mask(config.topology, instr.pairs)
        word |= instr.td << RD | _unsigned(mask, config.pair_mask_width, "SMIT mask")
    else:
        raise TypeError(f"cannot encode {instr!r}")
    return word


def _encode_bundle(bundle: Bundle, config: InstantiationConfig) -> int:
    if len(bundle.ops) != config.vliw_width:
        raise EqasmError(f"bundle has {len(bundle.ops)} slots, VLIW width is {config.vliw_width}; split first")
    W, qw, rw = config.instruction_width, config.q_opcode_width, config.reg_addr_width
    word = 1 << (W - 1)
    pos = W - 1
    for op in bundle.ops:
        if isinstance(op, WaitSlot):
            code, reg = config.wait_slot_opcode, _unsigned(op.cycles, rw, "bundle QWAIT")
        else:
            opdef = config.op(op.name)
            if opdef is None:
                raise UnknownOpcode(f"operation {op.name!r} not in this instantiation")
            code, reg = opdef.q_opcode, op.reg or 0
        pos -= qw
        word |= code << pos
        pos -= rw
        word |= reg << pos
    if not config.pi_width:
        if bundle.pi:
            raise ImmediateOverflow(f"PI {bundle.pi} needs a PI field, this instantiation has none")
        return word
    return word | _unsigned(bundle.pi, config.pi_width, "PI")


def encode(program: Program | list, config: InstantiationConfig) -> list[int]:
    """Encode a split, legalized program to instruction words."""
    instrs = program.resolved() if isinstance(program, Program) else list(program)
    return [encode_instruction(instr, config) for instr in instrs]


def decode_word(word: int, config: InstantiationConfig):
    W = config.instruction_width
    if word >> (W - 1) & 1:
        instr = _decode_bundle(word, config)
    else:
        instr = _decode_single(word, config)
    if encode_instruction(instr, config) != word:
        raise DecodeError(f"word {word:#0{W // 4 + 2}x} has non-zero unused bits")
    return instr


def _decode_single(word: int, config: InstantiationConfig):
    opcode = _field(word, OPC, 6)
    name = config.classical_name(opcode)
    if name is None:
        raise UnknownOpcode(f"word {word:#010x}: unknown opcode {opcode:#x}")
    rd, rs, rt = _field(word, RD, 5), _field(word, RS, 5), _field(word, RT, 5)
    imm10 = _field(word, 0, 10)
    if name == "LDI":
        return Ldi(rd, _sext(_field(word, 0, 20), 20))
    if name == "LDUI":
        return Ldui(rd, _field(word, 0, 15), rs)
    if name == "LD":
        return Ld(rd, rt, _sext(imm10, 10))
    if name == "ST":
        return St(rs, rt, _sext(imm10, 10))
    if name in ("FBR", "BR"):
        code = imm10 if name == "FBR" else rd
        if code >= len(FLAGS):
            raise DecodeError(f"word {word:#010x}: unknown comparison flag {code}")
        return Fbr(FLAGS[code], rd) if name == "FBR" else Br(FLAGS[code], _sext(_field(word, 0, 20), 20))
    if name == "FMR":
        return Fmr(rd, imm10)
    if name == "CMP":
        return Cmp(rs, rt)
    if name in ("AND", "OR", "XOR", "ADD", "SUB"):
        return Alu(name, rd, rs, rt)
    if name == "NOT":
        return Not(rd, rt)
    if name == "QWAIT":
        return QWait(_field(word, 0, config.qwait_imm_width))
    if name == "QWAITR":
        return QWaitR(rs)
    if name == "SMIS":
        return Smis(rd, mask_to_qubits(_field(word, 0, config.qubit_mask_width)))
    if name == "SMIT":
        return Smit(rd, mask_to_pair_list(config.topology, _field(word, 0, config.pair_mask_width)))
    raise UnknownOpcode(f"opcode {name} has no decoder")


def _decode_bundle(word: int, config: InstantiationConfig) -> Bundle:
    W, qw, rw = config.instruction_width, config.q_opcode_width, config.reg_addr_width
    pos = W - 1
    ops = []
    for _ in range(config.vliw_width):
        pos -= qw
        code = _field(word, pos, qw)
        pos -= rw
        reg = _field(word, pos, rw)
        if config.bundle_wait_slot and code == config.wait_slot_opcode:
            ops.append(WaitSlot(reg))
            continue
        opdef = config.op_by_code(code)
        if opdef is None:
            raise UnknownOpcode(f"word {word:#x}: unknown q_opcode {code:#x}")
        if opdef.kind == "qnop":
            ops.append(QOp(opdef.mnemonic))
        else:
            ops.append(QOp(opdef.mnemonic, reg, "T" if opdef.needs_treg else "S"))
    pi = _field(word, 0, config.pi_width) if config.pi_width else 0
    return Bundle(pi, tuple(ops))


def decode(words, config: InstantiationConfig) -> list:
    return [decode_word(w, config) for w in words]


# -- binary files ------------------------------------------------------------------
# 16-byte little-endian header: magic "EQSM", u16 format version, u16 bytes per
# word, u32 config hash, u32 word count; then the words, little-endian.


def to_bytes(words, config: InstantiationConfig) -> bytes:
    nbytes = config.instruction_width // 8
    body = b"".join(w.to_bytes(nbytes, "little") for w in words)
    return _HEADER.pack(MAGIC, FORMAT_VERSION, nbytes, config.hash32, len(words)) + body


def from_bytes(data: bytes, config: InstantiationConfig) -> list[int]:
    if len(data) < _HEADER.size:
        raise DecodeError("file too short for an eQASM header")
    magic, version, nbytes, digest, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DecodeError("not an eQASM binary (bad magic)")
    if version != FORMAT_VERSION:
        raise DecodeError(f"unsupported format version {version}")
    if digest != config.hash32:
        raise ConfigHashMismatch(f"binary built for config {digest:08x}, current config is {config.digest}")
    if nbytes != config.instruction_width // 8:
        raise DecodeError(f"binary has {nbytes}-byte words, config expects {config.instruction_width // 8}")
    body = data[_HEADER.size:]
    if len(body) != count * nbytes:
        raise DecodeError(f"header declares {count} words, file holds {len(body) / nbytes:g}")
    return [int.from_bytes(body[i:i + nbytes], "little") for i in range(0, len(body), nbytes)]


def is_binary(data: bytes) -> bool:
    return data[:4] == MAGIC


def write_binary(path, words, config: InstantiationConfig) -> None:
    Path(path).write_bytes(to_bytes(words, config))


def read_binary(path, config: InstantiationConfig) -> list[int]:
    return from_bytes(Path(path).read_bytes(), config)
