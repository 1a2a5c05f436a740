"""Instantiation configuration, chip topology and target-mask helpers.

An instantiation fixes everything the assembly language leaves open: word
and field widths, the quantum operation table (Q control store), the chip
topology whose directed edges are the allowed qubit pairs, and operation
durations. Configurations are loaded from TOML files; the default one ships
with the package and is identified by a short content hash that the
assembler embeds in binaries.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, NotAnAllowedPair

# Comparison flags set by CMP, in encoding order.
FLAGS = ("ALWAYS", "NEVER", "EQ", "NE", "LT", "GE", "LE", "GT", "LTU", "GEU", "LEU", "GTU")
FLAG_CODES = {name: code for code, name in enumerate(FLAGS)}

OP_KINDS = ("single", "two_qubit", "measure", "qnop")
TWO_QUBIT_GATES = ("cz", "cnot")

# Execution flag selectors.
FLAG_ALWAYS = 0
FLAG_LAST_ONE = 1
FLAG_LAST_ZERO = 2
FLAG_LAST_TWO_EQUAL = 3


class Issue(NamedTuple):
    code: str
    message: str


@dataclass(frozen=True)
class ChipTopology:
    """Qubits and allowed qubit pairs; edge address = position in ``edges``."""

    num_qubits: int = 7
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        index = {}
        for e, pair in enumerate(self.edges):
            index.setdefault(pair, e)
        return index

    def edge_index(self, src: int, tgt: int) -> int:
        try:
            return self._index[(src, tgt)]
        except KeyError:
            raise NotAnAllowedPair(f"({src}, {tgt}) is not an allowed qubit pair") from None

    @cached_property
    def source_edge_masks(self) -> tuple[int, ...]:
        """Per qubit, the OR-mask of edges on which it is the source."""
        masks = [0] * self.num_qubits
        for e, (src, _) in enumerate(self.edges):
            if src < self.num_qubits:
                masks[src] |= 1 << e
        return tuple(masks)

    @cached_property
    def target_edge_masks(self) -> tuple[int, ...]:
        masks = [0] * self.num_qubits
        for e, (_, tgt) in enumerate(self.edges):
            if tgt < self.num_qubits:
                masks[tgt] |= 1 << e
        return tuple(masks)

    def edges_of(self, qubit: int) -> list[int]:
        return [e for e, pair in enumerate(self.edges) if qubit in pair]


def surface7_topology() -> ChipTopology:
    return default_config().topology


def ring_topology(n: int) -> ChipTopology:
    """Bidirectional ring; edge k+n is the reverse of edge k."""
    forward = [(k, (k + 1) % n) for k in range(n)]
    return ChipTopology(n, tuple(forward + [(b, a) for a, b in forward]))


@dataclass(frozen=True)
class QOpDef:
    mnemonic: str
    q_opcode: int
    kind: str
    duration: int = 1
    flag_select: int = FLAG_ALWAYS
    axis: tuple[float, float, float] | None = None
    angle: float | None = None  # degrees
    gate: str | None = None  # two-qubit semantics: "cz" or "cnot"

    @property
    def needs_sreg(self) -> bool:
        return self.kind in ("single", "measure")

    @property
    def needs_treg(self) -> bool:
        return self.kind == "two_qubit"


_DEFAULT_DURATIONS = {"single": 1, "two_qubit": 2, "measure": 15, "qnop": 0}


@dataclass(frozen=True)
class InstantiationConfig:
    topology: ChipTopology
    operations: tuple[QOpDef, ...]
    classical_opcodes: Mapping[str, int]
    instruction_width: int = 32
    vliw_width: int = 2
    pi_width: int = 3
    qubit_mask_width: int = 7
    pair_mask_width: int = 16
    num_gprs: int = 32
    num_sregs: int = 32
    num_tregs: int = 32
    reg_addr_width: int = 5
    qwait_imm_width: int = 20
    q_opcode_width: int = 9
    cycle_time_ns: int = 20
    data_mem_size: int = 65536
    queue_depth: int = 64
    bundle_wait_slot: bool = False
    wait_slot_opcode: int = 511

    __hash__ = object.__hash__

    @property
    def num_qubits(self) -> int:
        return self.topology.num_qubits

    @property
    def max_pi(self) -> int:
        return (1 << self.pi_width) - 1

    @property
    def max_wait_slot(self) -> int:
        return (1 << self.reg_addr_width) - 1

    @cached_property
    def _ops_by_name(self) -> dict[str, QOpDef]:
        return {op.mnemonic.upper(): op for op in self.operations}

    @cached_property
    def _ops_by_code(self) -> dict[int, QOpDef]:
        return {op.q_opcode: op for op in self.operations}

    @cached_property
    def _classical_by_code(self) -> dict[int, str]:
        return {code: name for name, code in self.classical_opcodes.items()}

    def op(self, mnemonic: str) -> QOpDef | None:
        return self._ops_by_name.get(mnemonic.upper())

    def op_by_code(self, q_opcode: int) -> QOpDef | None:
        return self._ops_by_code.get(q_opcode)

    def classical_name(self, opcode: int) -> str | None:
        return self._classical_by_code.get(opcode)

    @property
    def qnop(self) -> QOpDef:
        return self._ops_by_code[0]

    def bundle_bits(self) -> int:
        return 1 + self.vliw_width * (self.q_opcode_width + self.reg_addr_width) + self.pi_width

    def replace(self, **changes) -> "InstantiationConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        inst = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                if f.name not in ("topology", "operations", "classical_opcodes")}
        ops = []
        for op in self.operations:
            entry = {k: v for k, v in dataclasses.asdict(op).items() if v is not None}
            if op.axis is not None:
                entry["axis"] = list(op.axis)
            ops.append(entry)
        return {
            "instantiation": inst,
            "topology": {"num_qubits": self.topology.num_qubits,
                         "edges": [list(e) for e in self.topology.edges]},
            "classical_opcodes": dict(self.classical_opcodes),
            "operations": ops,
        }

    @cached_property
    def digest(self) -> str:
        """Short hex content hash; stored in binary headers."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:8]

    @property
    def hash32(self) -> int:
        return int(self.digest, 16)


def config_from_dict(data: Mapping) -> InstantiationConfig:
    inst = dict(data.get("instantiation", {}))
    topo = data.get("topology", {})
    topology = ChipTopology(int(topo.get("num_qubits", 7)),
                            tuple(tuple(e) for e in topo.get("edges", ())))
    ops = []
    for entry in data.get("operations", ()):
        kind = entry["kind"]
        axis = entry.get("axis")
        ops.append(QOpDef(
            mnemonic=entry["mnemonic"],
            q_opcode=int(entry["q_opcode"]),
            kind=kind,
            duration=int(entry.get("duration", _DEFAULT_DURATIONS.get(kind, 1))),
            flag_select=int(entry.get("flag_select", FLAG_ALWAYS)),
            axis=tuple(float(a) for a in axis) if axis is not None else None,
            angle=float(entry["angle"]) if "angle" in entry else None,
            gate=entry.get("gate"),
        ))
    known = {f.name for f in dataclasses.fields(InstantiationConfig)}
    unknown = set(inst) - known
    if unknown:
        raise ConfigError([Issue("UnknownKey", f"unknown instantiation keys: {sorted(unknown)}")])
    return InstantiationConfig(
        topology=topology,
        operations=tuple(ops),
        classical_opcodes={k.upper(): int(v) for k, v in data.get("classical_opcodes", {}).items()},
        **inst,
    )


def load_config(path: str | Path | None = None) -> InstantiationConfig:
    """Load a TOML instantiation file; ``None`` gives the packaged default."""
    if path is None:
        return default_config()
    with open(path, "rb") as fh:
        return config_from_dict(tomllib.load(fh))


@lru_cache(maxsize=1)
def default_config() -> InstantiationConfig:
    text = resources.files("eqasm").joinpath("data/default.toml").read_bytes()
    return config_from_dict(tomllib.loads(text.decode()))


def default_config_path() -> Path:
    return Path(str(resources.files("eqasm").joinpath("data/default.toml")))


# -- validation ----------------------------------------------------------------


def validate_topology(topology: ChipTopology) -> list[Issue]:
    issues = []
    seen = set()
    for e, (a, b) in enumerate(topology.edges):
        for q in (a, b):
            if not 0 <= q < topology.num_qubits:
                issues.append(Issue("DanglingQubit",
                                    f"edge {e} ({a}->{b}) references qubit {q} outside 0..{topology.num_qubits - 1}"))
        if a == b:
            issues.append(Issue("SelfLoop", f"edge {e} connects qubit {a} to itself"))
        if (a, b) in seen:
            issues.append(Issue("DuplicateEdge", f"edge {e} ({a}->{b}) listed more than once"))
        seen.add((a, b))
    for e, (a, b) in enumerate(topology.edges):
        if (b, a) not in seen:
            issues.append(Issue("MissingReverseEdge", f"edge {e} ({a}->{b}) has no reverse ({b}->{a})"))
    return issues


def validate_config(config: InstantiationConfig) -> list[Issue]:
    issues = list(validate_topology(config.topology))
    W = config.instruction_width
    if W not in (32, 64):
        issues.append(Issue("BitBudgetExceeded", f"instruction width {W} must be 32 or 64"))
    if config.bundle_bits() > W:
        issues.append(Issue("BitBudgetExceeded",
                            f"bundle needs {config.bundle_bits()} bits (1 + {config.vliw_width}x"
                            f"({config.q_opcode_width}+{config.reg_addr_width}) + {config.pi_width}) > {W}"))
    for name, width in (("SMIS", config.qubit_mask_width), ("SMIT", config.pair_mask_width)):
        if 1 + 6 + config.reg_addr_width + width > 32:
            issues.append(Issue("BitBudgetExceeded", f"{name} mask of {width} bits does not fit a single-format word"))
    if config.qwait_imm_width > 20:
        issues.append(Issue("BitBudgetExceeded", "QWAIT immediate wider than 20 bits"))
    if config.vliw_width < 1:
        issues.append(Issue("BitBudgetExceeded", "VLIW width must be at least 1"))
    if config.pair_mask_width != config.topology.num_edges:
        issues.append(Issue("MaskWidthMismatch",
                            f"pair_mask_width={config.pair_mask_width} but topology has {config.topology.num_edges} edges"))
    if config.qubit_mask_width != config.num_qubits:
        issues.append(Issue("MaskWidthMismatch",
                            f"qubit_mask_width={config.qubit_mask_width} but topology has {config.num_qubits} qubits"))
    for count_name in ("num_gprs", "num_sregs", "num_tregs"):
        if getattr(config, count_name) > (1 << config.reg_addr_width):
            issues.append(Issue("BitBudgetExceeded", f"{count_name} exceeds the register address space"))

    names: dict[str, str] = {}
    codes: dict[int, str] = {}
    for op in config.operations:
        key = op.mnemonic.upper()
        if key in names:
            issues.append(Issue("DuplicateMnemonic", f"mnemonic {op.mnemonic} defined twice"))
        names[key] = op.mnemonic
        if op.q_opcode in codes:
            issues.append(Issue("DuplicateOpcode",
                                f"{op.mnemonic} and {codes[op.q_opcode]} share q_opcode {op.q_opcode:#x}"))
        codes[op.q_opcode] = op.mnemonic
        if not 0 <= op.q_opcode < (1 << config.q_opcode_width):
            issues.append(Issue("BitBudgetExceeded", f"q_opcode of {op.mnemonic} does not fit {config.q_opcode_width} bits"))
        if op.kind not in OP_KINDS:
            issues.append(Issue("BadOperation", f"{op.mnemonic}: unknown kind {op.kind!r}"))
        if (op.q_opcode == 0) != (op.kind == "qnop"):
            issues.append(Issue("BadOperation", f"q_opcode 0 is reserved for QNOP ({op.mnemonic})"))
        if not 0 <= op.flag_select <= 3:
            issues.append(Issue("BadOperation", f"{op.mnemonic}: flag_select must be 0..3"))
        if op.kind == "measure" and op.flag_select != FLAG_ALWAYS:
            issues.append(Issue("ConditionalMeasurement", f"{op.mnemonic}: measurements must use flag 0"))
        if op.kind == "single" and (op.axis is None or op.angle is None):
            issues.append(Issue("BadOperation", f"{op.mnemonic}: single-qubit ops need axis and angle"))
        if op.kind == "single" and op.axis is not None and not math.isclose(math.hypot(*op.axis), 1.0, abs_tol=1e-9):
            issues.append(Issue("BadOperation", f"{op.mnemonic}: rotation axis is not a unit vector"))
        if op.kind == "two_qubit" and op.gate not in TWO_QUBIT_GATES:
            issues.append(Issue("BadOperation", f"{op.mnemonic}: two-qubit gate must be one of {TWO_QUBIT_GATES}"))
        if op.duration < 0:
            issues.append(Issue("BadOperation", f"{op.mnemonic}: negative duration"))
    if 0 not in codes:
        issues.append(Issue("BadOperation", "no QNOP (q_opcode 0) defined"))
    if config.bundle_wait_slot and config.wait_slot_opcode in codes:
        issues.append(Issue("DuplicateOpcode", f"wait-slot opcode {config.wait_slot_opcode:#x} is also an operation"))

    ccodes: dict[int, str] = {}
    for name, code in config.classical_opcodes.items():
        if code in ccodes:
            issues.append(Issue("DuplicateOpcode", f"{name} and {ccodes[code]} share opcode {code:#x}"))
        ccodes[code] = name
        if not 0 < code < 64:
            issues.append(Issue("BitBudgetExceeded", f"opcode of {name} must be in 1..63"))
    return issues


def check_config(config: InstantiationConfig) -> InstantiationConfig:
    issues = validate_config(config)
    if issues:
        raise ConfigError(issues)
    return config


# -- masks -----------------------------------------------------------------------


def qubits_to_mask(qubits: Iterable[int]) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return mask


def mask_to_qubits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def pair_list_to_mask(topology: ChipTopology, pairs: Iterable[Sequence[int]]) -> int:
    mask = 0
    for src, tgt in pairs:
        mask |= 1 << topology.edge_index(src, tgt)
    return mask


def mask_to_pair_list(topology: ChipTopology, mask: int) -> tuple[tuple[int, int], ...]:
    if mask >> topology.num_edges:
        raise NotAnAllowedPair(f"mask {mask:#x} selects edges beyond {topology.num_edges - 1}")
    return tuple(topology.edges[e] for e in range(topology.num_edges) if mask >> e & 1)


def pair_mask_conflicts(topology: ChipTopology, mask: int) -> list[int]:
    """Qubits touched by more than one selected edge."""
    seen: dict[int, int] = {}
    for e in range(topology.num_edges):
        if mask >> e & 1:
            for q in topology.edges[e]:
                seen[q] = seen.get(q, 0) + 1
    return sorted(q for q, n in seen.items() if n > 1)
