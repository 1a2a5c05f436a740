"""Cycle-level model of the quantum control microarchitecture.

The model has two timing domains that advance together, one cycle per loop
iteration:

* the non-deterministic domain: the classical pipeline retires at most
  ``issue_rate`` instruction words per cycle and forwards quantum
  instructions to the timestamp manager, which builds the timeline (reserve
  phase). Micro-operations of the current timing point are buffered by the
  operation-combination stage and flushed to the event queue when a
  different timing point is generated, or at the latest when the trigger
  timer reaches their point;
* the deterministic domain: a timer that starts at 0 when the first timing
  instruction is reserved and triggers every queued micro-operation at its
  timestamp (trigger phase), applying fast conditional execution.

Within a cycle the order is: classical step, deadline flush, measurement
write-back, trigger. A flushed micro-operation whose timestamp is already
behind the timer raises :class:`TimingViolation`. When the pipeline is idle
or stalled the loop jumps straight to the next scheduled event.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..assembler.encoding import decode
from ..backend import QuantumState, op_unitary
from ..errors import (BackendError, BackendFault, BundleConflict, ConflictingPairSelection,
                      CycleLimitExceeded, Deadlock, InvalidTargetRegister, LaneConflict, MemoryOutOfRange,
                      MisalignedAccess, PCOutOfRange, SimulationError, TimingViolation)
from ..instructions import (Alu, Br, Bundle, Cmp, Fbr, Fmr, Ld, Ldi, Ldui, Not, QWait, QWaitR, Smis,
                            Smit, St, WaitSlot)
from ..isa import FLAGS, InstantiationConfig, pair_list_to_mask, qubits_to_mask
from .opsel import SEL_SINGLE, SEL_SRC, SEL_TGT, microcode_decode, resolve_opsel
from .trace import MeasurementRecord, Trace

MASK32 = 0xFFFFFFFF
QWAIT_BITS = 0xFFFFF  # only the 20 LSBs of a register wait are used


# -- classical semantics ---------------------------------------------------------------


def to_signed(x: int) -> int:
    x &= MASK32
    return x - (1 << 32) if x >> 31 else x


def alu(op: str, a: int, b: int) -> int:
    if op == "AND":
        return a & b & MASK32
    if op == "OR":
        return (a | b) & MASK32
    if op == "XOR":
        return (a ^ b) & MASK32
    if op == "ADD":
        return (a + b) & MASK32
    if op == "SUB":
        return (a - b) & MASK32
    raise ValueError(op)


def compare(a: int, b: int) -> dict[str, bool]:
    sa, sb = to_signed(a), to_signed(b)
    ua, ub = a & MASK32, b & MASK32
    return {
        "ALWAYS": True, "NEVER": False,
        "EQ": ua == ub, "NE": ua != ub,
        "LT": sa < sb, "GE": sa >= sb, "LE": sa <= sb, "GT": sa > sb,
        "LTU": ua < ub, "GEU": ua >= ub, "LEU": ua <= ub, "GTU": ua > ub,
    }


def sign_extend(value: int, bits: int) -> int:
    value &= (1 << bits) - 1
    return (value - (1 << bits)) & MASK32 if value >> (bits - 1) else value


@dataclass
class ArchState:
    """Architectural state visible to eQASM programs."""

    num_qubits: int
    num_gprs: int = 32
    num_sregs: int = 32
    num_tregs: int = 32
    data_mem_size: int = 65536
    pc: int = 0
    gpr: list[int] = field(default_factory=list)
    flags: dict[str, bool] = field(default_factory=dict)
    sregs: list[int] = field(default_factory=list)
    tregs: list[int] = field(default_factory=list)
    q: list[int] = field(default_factory=list)
    c: list[int] = field(default_factory=list)
    history: list[list[int]] = field(default_factory=list)
    memory: bytearray = field(default_factory=bytearray)

    def __post_init__(self):
        self.gpr = self.gpr or [0] * self.num_gprs
        self.flags = self.flags or {f: f == "ALWAYS" for f in FLAGS}
        self.sregs = self.sregs or [0] * self.num_sregs
        self.tregs = self.tregs or [0] * self.num_tregs
        self.q = self.q or [0] * self.num_qubits
        self.c = self.c or [0] * self.num_qubits
        self.history = self.history or [[] for _ in range(self.num_qubits)]
        self.memory = self.memory or bytearray(self.data_mem_size)

    @classmethod
    def for_config(cls, config: InstantiationConfig) -> "ArchState":
        return cls(config.num_qubits, config.num_gprs, config.num_sregs, config.num_tregs,
                   config.data_mem_size)

    def q_valid(self, qubit: int) -> bool:
        return self.c[qubit] == 0

    def exec_flags(self, qubit: int) -> tuple[bool, bool, bool, bool]:
        """Flags: always, last result 1, last result 0, last two results equal.

        Before any measurement has finished on the qubit only flag 0 is set.
        """
        h = self.history[qubit]
        last = h[-1] if h else None
        return (True, last == 1, last == 0, len(h) >= 2 and h[-1] == h[-2])

    def record_result(self, qubit: int, bit: int) -> None:
        self.q[qubit] = bit
        self.c[qubit] -= 1
        self.history[qubit] = (self.history[qubit] + [bit])[-2:]

    def _address(self, base: int, offset: int) -> int:
        addr = (self.gpr[base] + offset) & MASK32
        if addr % 4:
            raise MisalignedAccess(f"address {addr:#x} is not word aligned")
        if addr + 4 > len(self.memory):
            raise MemoryOutOfRange(f"address {addr:#x} outside {len(self.memory)}-byte data memory")
        return addr


def step_classical(state: ArchState, instr) -> None:
    """Execute one auxiliary classical instruction (not FMR) and advance PC."""
    g = state.gpr
    next_pc = state.pc + 1
    if isinstance(instr, Cmp):
        state.flags = compare(g[instr.rs], g[instr.rt])
    elif isinstance(instr, Br):
        if state.flags[instr.flag]:
            next_pc = state.pc + instr.target
    elif isinstance(instr, Fbr):
        g[instr.rd] = int(state.flags[instr.flag])
    elif isinstance(instr, Ldi):
        g[instr.rd] = sign_extend(instr.imm, 20)
    elif isinstance(instr, Ldui):
        g[instr.rd] = ((instr.imm & 0x7FFF) << 17) | (g[instr.rs] & 0x1FFFF)
    elif isinstance(instr, Ld):
        addr = state._address(instr.rt, instr.imm)
        g[instr.rd] = int.from_bytes(state.memory[addr:addr + 4], "little")
    elif isinstance(instr, St):
        addr = state._address(instr.rt, instr.imm)
        state.memory[addr:addr + 4] = (g[instr.rs] & MASK32).to_bytes(4, "little")
    elif isinstance(instr, Alu):
        g[instr.rd] = alu(instr.op, g[instr.rs], g[instr.rt])
    elif isinstance(instr, Not):
        g[instr.rd] = ~g[instr.rt] & MASK32
    else:
        raise TypeError(f"{instr!r} is not a classical instruction")
    state.pc = next_pc


# -- quantum pipeline --------------------------------------------------------------------


@dataclass(frozen=True)
class TimedMicroOp:
    timestamp: int
    qubit: int
    micro_op: str  # "s", "src", "tgt" or "meas"
    mnemonic: str
    flag_select: int = 0
    duration: int = 1
    partner: int | None = None  # other qubit of a two-qubit operation

    def label(self) -> str:
        if self.micro_op in ("src", "tgt"):
            return f"{self.mnemonic}.{self.micro_op}({self.partner})"
        return self.mnemonic


class Simulator:
    """Runs one program on one instantiation; create a new instance per run."""

    def __init__(self, config: InstantiationConfig, instructions, *, seed: int | None = 0,
                 script: dict[int, list[int]] | None = None, script_mode: str = "postselect",
                 max_cycles: int = 10 ** 8, start_offset: int = 0, issue_rate: int = 1,
                 backend: QuantumState | None = None, trace_classical: bool = True):
        if script_mode not in ("mock", "postselect"):
            raise ValueError("script_mode must be 'mock' or 'postselect'")
        self.config = config
        self.program = list(instructions)
        self.state = ArchState.for_config(config)
        self.backend = backend if backend is not None else QuantumState(config.num_qubits, seed)
        self.script = {q: deque(bits) for q, bits in (script or {}).items()}
        self.script_mode = script_mode
        self.max_cycles = max_cycles
        self.issue_rate = issue_rate
        self.trace_classical = trace_classical
        self.trace = Trace()

        self.cycle = 0
        self.timer = 0
        self.timer_started = False
        self.last_point = start_offset
        self.buffer: dict[int, TimedMicroOp] = {}
        self.buffer_point = start_offset
        self.queue: deque[tuple[int, list[TimedMicroOp]]] = deque()
        self.pending: list[tuple[int, int, int, float]] = []  # (done_at, qubit, result, p1)
        self._stalled_pc = None
        self._unitaries = {op.mnemonic: op_unitary(op) for op in config.operations if op.kind == "single"}
        self._gates = {op.mnemonic: op.gate for op in config.operations if op.kind == "two_qubit"}
        self._slots = [self._decode_slots(i) if isinstance(i, Bundle) else None for i in self.program]

    @classmethod
    def from_program(cls, config, program, **kwargs) -> "Simulator":
        return cls(config, program.resolved(), **kwargs)

    @classmethod
    def from_words(cls, config, words, **kwargs) -> "Simulator":
        return cls(config, decode(words, config), **kwargs)

    # -- driver --------------------------------------------------------------------------

    def run(self, strict: bool = True) -> Trace:
        """Run to completion; halts are recorded in the trace and re-raised if ``strict``."""
        idle_stall = False
        try:
            while True:
                if self.cycle > self.max_cycles:
                    raise CycleLimitExceeded(f"cycle limit {self.max_cycles} reached", self.cycle)
                status = self._classical_step()
                if status == "run":
                    idle_stall = False
                if self.timer_started:
                    self._deadline_flush()
                    self._writeback()
                    self._trigger()
                if status != "run":
                    nxt = self._next_event()
                    if nxt is None:
                        if status == "done":
                            break
                        # a write-back in this cycle may have cleared the stall
                        if idle_stall:
                            raise Deadlock(f"pipeline stalled at PC {self.state.pc} with nothing pending",
                                           self.cycle)
                        idle_stall = True
                    elif nxt - self.timer - 1 > 0:
                        skip = nxt - self.timer - 1
                        self.cycle += skip
                        self.timer += skip
                self.cycle += 1
                if self.timer_started:
                    self.timer += 1
        except SimulationError as exc:
            self._halt(exc)
            if strict:
                raise
        self.trace.cycles = self.cycle
        return self.trace

    def _next_event(self) -> int | None:
        if not self.timer_started:
            return None
        candidates = [t for t, *_ in self.pending]
        if self.queue:
            candidates.append(self.queue[0][0])
        if self.buffer:
            candidates.append(self.buffer_point)
        return min(candidates) if candidates else None

    def _halt(self, exc: SimulationError) -> None:
        if exc.cycle is None:
            exc.cycle = self.cycle
        target = f"q{exc.qubit}" if exc.qubit is not None else "-"
        ev_ts = exc.timestamp if exc.timestamp is not None else (self.timer if self.timer_started else None)
        self.trace.add(self.cycle, ev_ts, "halt", type(exc).__name__, target, str(exc))
        self.trace.halt = self.trace.events[-1]
        # drain in-flight work so the report shows what never ran
        for ts, ops in list(self.queue) + ([(self.buffer_point, list(self.buffer.values()))] if self.buffer else []):
            for op in ops:
                self.trace.add(self.cycle, ts, "halt", "drain", f"q{op.qubit}", op.label())
        self.queue.clear()
        self.buffer.clear()

    # -- non-deterministic domain ------------------------------------------------------------

    def _classical_step(self) -> str:
        for _ in range(self.issue_rate):
            st = self.state
            if st.pc == len(self.program):
                return "done"
            if not 0 <= st.pc < len(self.program):
                raise PCOutOfRange(f"PC {st.pc} outside program of {len(self.program)} words", self.cycle)
            instr = self.program[st.pc]
            if isinstance(instr, Fmr):
                if st.c[instr.qubit]:
                    if self._stalled_pc != st.pc:
                        self._stalled_pc = st.pc
                        self._log("classical", "stall", f"q{instr.qubit}", f"{instr} waits for Q{instr.qubit}")
                    return "stall"
                st.gpr[instr.rd] = st.q[instr.qubit]
                st.pc += 1
            elif isinstance(instr, (QWait, QWaitR, Bundle, Smis, Smit)):
                if not self._reserve(instr):
                    if self._stalled_pc != st.pc:
                        self._stalled_pc = st.pc
                        self._log("classical", "stall", "-", "event queue full")
                    return "stall"
                st.pc += 1
            else:
                step_classical(st, instr)
            self._stalled_pc = None
            if self.trace_classical:
                self._log("classical", "exec", "-", str(instr))
        return "run"

    def _log(self, domain, kind, target="-", detail="-", status="-", ts=None):
        self.trace.add(self.cycle, ts, domain, kind, target, detail, status)

    def _decode_slots(self, bundle: Bundle):
        slots = []
        for lane, op in enumerate(bundle.ops):
            if isinstance(op, WaitSlot):
                continue
            opdef = self.config.op(op.name)
            mc = microcode_decode(self.config, opdef.q_opcode)
            if mc.kind != "qnop":
                slots.append((lane, mc, op.reg))
        return slots

    def _start_timer(self):
        if not self.timer_started:
            self.timer_started = True
            self.timer = 0

    def _reserve(self, instr) -> bool:
        """Reserve phase for one quantum instruction; False means stall."""
        st = self.state
        if isinstance(instr, Smis):
            st.sregs[instr.sd] = qubits_to_mask(instr.qubits)
            return True
        if isinstance(instr, Smit):
            st.tregs[instr.td] = pair_list_to_mask(self.config.topology, instr.pairs)
            return True
        self._start_timer()
        if isinstance(instr, QWait):
            interval = instr.imm
        elif isinstance(instr, QWaitR):
            interval = st.gpr[instr.rs] & QWAIT_BITS
        else:
            interval = instr.pi + instr.wait
        point = self.last_point + interval
        if point != self.buffer_point:
            if self.buffer and not self._flush():
                return False
            self.buffer_point = point
        if point != self.last_point:
            self._log("reserve", "point", "-", f"+{interval}", ts=point)
        self.last_point = point
        if isinstance(instr, Bundle):
            self._combine(self._lane_ops(self._slots[st.pc], point), point)
        return True

    def _lane_ops(self, slots, point) -> list[dict[int, TimedMicroOp]]:
        st, topo = self.state, self.config.topology
        lanes = []
        for lane, mc, reg in slots:
            mask = st.tregs[reg] if mc.kind == "two_qubit" else st.sregs[reg]
            try:
                sel = resolve_opsel(topo, mask, mc.kind)
            except ConflictingPairSelection as exc:
                raise InvalidTargetRegister(str(exc), self.cycle, timestamp=point) from None
            ops = {}
            for q, s in enumerate(sel):
                if s == SEL_SINGLE:
                    kind = "meas" if mc.kind == "measure" else "s"
                    ops[q] = TimedMicroOp(point, q, kind, mc.mnemonic, mc.flag_select, mc.duration)
                elif s in (SEL_SRC, SEL_TGT):
                    role_masks = topo.source_edge_masks if s == SEL_SRC else topo.target_edge_masks
                    edge = (mask & role_masks[q]).bit_length() - 1
                    a, b = topo.edges[edge]
                    ops[q] = TimedMicroOp(point, q, "src" if s == SEL_SRC else "tgt", mc.mnemonic,
                                          0, mc.duration, b if s == SEL_SRC else a)
            lanes.append(ops)
        return lanes

    def _combine(self, lanes, point) -> None:
        merged: dict[int, TimedMicroOp] = {}
        for ops in lanes:
            for q, op in ops.items():
                if q in merged:
                    raise LaneConflict(f"two VLIW lanes address qubit {q} at timestamp {point} "
                                       f"({merged[q].label()} and {op.label()})", self.cycle, q, point)
                merged[q] = op
        for q, op in merged.items():
            if q in self.buffer:
                raise BundleConflict(f"two bundles address qubit {q} at timestamp {point} "
                                     f"({self.buffer[q].label()} and {op.label()})", self.cycle, q, point)
            self.buffer[q] = op
            if op.micro_op == "meas":
                self.state.c[q] += 1  # Qi invalid from issue until write-back
                self._log("reserve", "meas-issue", f"q{q}", f"C={self.state.c[q]}", ts=point)

    def _flush(self, force: bool = False) -> bool:
        if self.buffer_point < self.timer:
            q = min(self.buffer)
            raise TimingViolation(f"micro-operations for timestamp {self.buffer_point} reached the event "
                                  f"queue at timer {self.timer}", self.cycle, q, self.buffer_point)
        if not force and len(self.queue) >= self.config.queue_depth:
            return False
        ops = sorted(self.buffer.values(), key=lambda o: o.qubit)
        self.queue.append((self.buffer_point, ops))
        self._log("reserve", "flush", "-", f"{len(ops)} micro-op(s)", ts=self.buffer_point)
        self.buffer = {}
        return True

    def _deadline_flush(self) -> None:
        if self.buffer and self.buffer_point <= self.timer:
            self._flush(force=True)

    # -- deterministic domain --------------------------------------------------------------------

    def _writeback(self) -> None:
        if not self.pending:
            return
        due = [p for p in self.pending if p[0] == self.timer]
        if not due:
            return
        self.pending = [p for p in self.pending if p[0] != self.timer]
        for done_at, qubit, bit, p1 in due:
            self.state.record_result(qubit, bit)
            self.trace.measurements.append(MeasurementRecord(done_at, qubit, bit, p1))
            self._log("measure", "result", f"q{qubit}", str(bit), ts=done_at)

    def _trigger(self) -> None:
        while self.queue and self.queue[0][0] == self.timer:
            ts, ops = self.queue.popleft()
            for op in ops:
                released = op.micro_op not in ("s",) or self.state.exec_flags(op.qubit)[op.flag_select]
                self._log("trigger", "op", f"q{op.qubit}", op.label(), "released" if released else "canceled",
                          ts=ts)
                if released:
                    try:
                        self._apply(op)
                    except BackendError as exc:
                        raise BackendFault(f"{type(exc).__name__}: {exc}", self.cycle, op.qubit, ts) from exc

    def _apply(self, op: TimedMicroOp) -> None:
        be = self.backend
        if op.micro_op == "s":
            be.apply_single(op.qubit, self._unitaries[op.mnemonic])
        elif op.micro_op == "src":
            if self._gates[op.mnemonic] == "cz":
                be.apply_cz(op.qubit, op.partner)
            else:
                be.apply_cnot(op.qubit, op.partner)
        elif op.micro_op == "meas":
            scripted = self.script.get(op.qubit)
            forced = scripted.popleft() if scripted else None
            if forced is not None and self.script_mode == "postselect":
                bit, p1 = be.measure(op.qubit, forced)
            else:
                bit, p1 = be.measure(op.qubit)
                if forced is not None:
                    bit = forced
            self.pending.append((op.timestamp + op.duration, op.qubit, bit, p1))


def run_program(config, program, **kwargs) -> Trace:
    """Convenience wrapper: simulate a :class:`Program` or instruction list."""
    strict = kwargs.pop("strict", True)
    instrs = program.resolved() if hasattr(program, "resolved") else list(program)
    return Simulator(config, instrs, **kwargs).run(strict=strict)
