"""Simulation traces and scripted measurement results.

Trace file format, one event per line, tab separated::

    cycle  timestamp  domain  kind  target  detail  status

``cycle`` counts classical-pipeline cycles from program start; ``timestamp``
is the timeline position (``-`` for classical events). Domains are
``classical``, ``reserve``, ``trigger``, ``measure`` and ``halt``. ``status``
is ``released`` or ``canceled`` for triggered micro-operations and ``-``
otherwise. Lines starting with ``#`` are comments.

Script files give per-qubit result queues, one qubit per line::

    # qubit: results in measurement order
    1: 0 1 0 1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

HEADER = "# eqasm-trace v1\tcycle\ttimestamp\tdomain\tkind\ttarget\tdetail\tstatus"


@dataclass(frozen=True)
class TraceEvent:
    cycle: int
    timestamp: int | None
    domain: str
    kind: str
    target: str = "-"
    detail: str = "-"
    status: str = "-"

    def line(self) -> str:
        ts = "-" if self.timestamp is None else str(self.timestamp)
        return "\t".join((str(self.cycle), ts, self.domain, self.kind, self.target, self.detail or "-",
                          self.status))


@dataclass(frozen=True)
class TriggeredOp:
    timestamp: int
    qubit: int
    op: str
    status: str


@dataclass(frozen=True)
class MeasurementRecord:
    timestamp: int  # when the result was written back
    qubit: int
    result: int
    p1: float  # backend probability of |1> just before the measurement


@dataclass
class Trace:
    events: list[TraceEvent] = field(default_factory=list)
    measurements: list[MeasurementRecord] = field(default_factory=list)
    halt: TraceEvent | None = None
    cycles: int = 0

    def add(self, *args, **kwargs) -> None:
        self.events.append(TraceEvent(*args, **kwargs))

    def triggered(self, status: str | None = None) -> list[TriggeredOp]:
        out = []
        for ev in self.events:
            if ev.domain == "trigger" and (status is None or ev.status == status):
                out.append(TriggeredOp(ev.timestamp, int(ev.target[1:]), ev.detail, ev.status))
        return out

    def schedule(self) -> list[tuple[int, int, str]]:
        """Released ``(timestamp, qubit, op)`` triples in trigger order."""
        return [(t.timestamp, t.qubit, t.op) for t in self.triggered("released")]

    def results(self, qubit: int | None = None) -> list[int]:
        return [m.result for m in self.measurements if qubit is None or m.qubit == qubit]

    def text(self) -> str:
        return HEADER + "\n" + "".join(ev.line() + "\n" for ev in self.events)

    def write(self, path) -> None:
        Path(path).write_text(self.text())


def parse_trace(text: str) -> list[TraceEvent]:
    events = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        cycle, ts, domain, kind, target, detail, status = line.split("\t")
        events.append(TraceEvent(int(cycle), None if ts == "-" else int(ts), domain, kind, target, detail,
                                 status))
    return events


_SCRIPT_LINE = re.compile(r"^\s*[qQ]?(\d+)\s*:\s*(.*)$")


def parse_script(text: str) -> dict[int, list[int]]:
    script: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SCRIPT_LINE.match(line)
        if not m:
            raise ValueError(f"script line {lineno}: expected '<qubit>: <bits>'")
        bits = m.group(2).replace(",", " ").split()
        if any(b not in ("0", "1") for b in bits):
            raise ValueError(f"script line {lineno}: results must be 0 or 1")
        script.setdefault(int(m.group(1)), []).extend(int(b) for b in bits)
    return script


def load_script(path) -> dict[int, list[int]]:
    return parse_script(Path(path).read_text())
