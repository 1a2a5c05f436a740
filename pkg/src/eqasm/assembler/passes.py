"""Legality checks and bundle splitting."""

from __future__ import annotations

from ..errors import AssemblyError, Diagnostic, NotAnAllowedPair
from ..instructions import Bundle, QOp, QWait, Smis, Smit, WaitSlot
from ..isa import InstantiationConfig, pair_list_to_mask, pair_mask_conflicts
from .program import Program


def legalize(program: Program, config: InstantiationConfig) -> Program:
    """Check target masks and canonicalize SMIS/SMIT operand order.

    Errors raise :class:`AssemblyError`; statically visible overlaps between
    bundle slots are reported as warnings on the returned program.
    """
    topo = config.topology
    diags: list[Diagnostic] = []
    warnings: list[Diagnostic] = []
    out = []
    # Register contents as seen in straight-line program order; ignores branches.
    sregs: dict[int, frozenset[int]] = {}
    tregs: dict[int, frozenset[int]] = {}

    for i, instr in enumerate(program.instructions):
        line = program.lines[i] if i < len(program.lines) else 0
        if isinstance(instr, Smis):
            bad = [q for q in instr.qubits if not 0 <= q < min(config.num_qubits, config.qubit_mask_width)]
            if bad:
                diags.append(Diagnostic(line, 1, "MaskOverflow",
                                        f"SMIS S{instr.sd}: qubit(s) {bad} outside the {config.qubit_mask_width}-bit mask"))
                continue
            instr = Smis(instr.sd, tuple(sorted(set(instr.qubits))))
            sregs[instr.sd] = frozenset(instr.qubits)
        elif isinstance(instr, Smit):
            try:
                mask = pair_list_to_mask(topo, instr.pairs)
            except NotAnAllowedPair as exc:
                diags.append(Diagnostic(line, 1, "NotAnAllowedPair", f"SMIT T{instr.td}: {exc}"))
                continue
            if mask >> config.pair_mask_width:
                diags.append(Diagnostic(line, 1, "MaskOverflow",
                                        f"SMIT T{instr.td}: pair mask exceeds {config.pair_mask_width} bits"))
                continue
            shared = pair_mask_conflicts(topo, mask)
            if shared:
                diags.append(Diagnostic(line, 1, "ConflictingPairSelection",
                                        f"SMIT T{instr.td}: qubit(s) {shared} appear in more than one selected pair"))
                continue
            instr = Smit(instr.td, tuple(topo.edges[e] for e in range(topo.num_edges) if mask >> e & 1))
            tregs[instr.td] = frozenset(q for pair in instr.pairs for q in pair)
        elif isinstance(instr, Bundle):
            waits = [op for op in instr.ops if isinstance(op, WaitSlot)]
            if len(waits) > 1:
                diags.append(Diagnostic(line, 1, "SyntaxError", "at most one QWAIT slot per bundle"))
                continue
            if waits and waits[0].cycles > config.max_wait_slot:
                diags.append(Diagnostic(line, 1, "ImmediateOverflow",
                                        f"bundle QWAIT {waits[0].cycles} exceeds {config.max_wait_slot}"))
                continue
            seen: dict[int, str] = {}
            for op in instr.ops:
                if not isinstance(op, QOp) or op.reg is None:
                    continue
                regs = tregs if op.reg_kind == "T" else sregs
                for q in regs.get(op.reg, ()):
                    if q in seen:
                        warnings.append(Diagnostic(line, 1, "PossibleLaneConflict",
                                                   f"{seen[q]} and {op} may both address qubit {q}",
                                                   severity="warning"))
                    seen[q] = str(op)
        out.append(instr)

    if diags:
        raise AssemblyError(diags)
    return Program(out, dict(program.labels), list(program.lines), program.warnings + warnings)


def split_bundle(bundle: Bundle, config: InstantiationConfig) -> list:
    """Split one bundle into VLIW-width words, padding with QNOP.

    A PI too large for the PI field becomes a preceding QWAIT carrying the
    excess, leaving the largest encodable PI on the bundle.
    """
    w = config.vliw_width
    out = []
    pi = bundle.pi
    if pi > config.max_pi:
        out.append(QWait(pi - config.max_pi))
        pi = config.max_pi
    ops = [op for op in bundle.ops if isinstance(op, WaitSlot)]
    ops += [op for op in bundle.ops if not isinstance(op, WaitSlot)]
    qnop = QOp(config.qnop.mnemonic)
    for start in range(0, len(ops), w):
        chunk = ops[start:start + w]
        chunk += [qnop] * (w - len(chunk))
        out.append(Bundle(pi if start == 0 else 0, tuple(chunk)))
    return out


def split_bundles(program: Program, config: InstantiationConfig) -> Program:
    out, lines, new_index = [], [], []
    for i, instr in enumerate(program.instructions):
        new_index.append(len(out))
        pieces = split_bundle(instr, config) if isinstance(instr, Bundle) else [instr]
        out.extend(pieces)
        lines.extend([program.lines[i] if i < len(program.lines) else 0] * len(pieces))
    new_index.append(len(out))
    labels = {name: new_index[idx] for name, idx in program.labels.items()}
    return Program(out, labels, lines, list(program.warnings))
