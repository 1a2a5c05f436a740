from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import Diagnostic
from ..instructions import Br


@dataclass
class Program:
    """Ordered instructions plus the label table.

    ``labels`` maps a label to the index of the instruction it precedes (an
    index equal to ``len(instructions)`` marks the end of the program).
    ``lines`` holds the source line of each instruction, 0 when synthesized.
    """

    instructions: list = field(default_factory=list)
    labels: dict[str, int] = field(default_factory=dict)
    lines: list[int] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def text(self) -> str:
        by_index: dict[int, list[str]] = {}
        for name, idx in self.labels.items():
            by_index.setdefault(idx, []).append(name)
        out = []
        for i, instr in enumerate(self.instructions):
            for name in sorted(by_index.get(i, ())):
                out.append(f"{name}:")
            out.append(f"    {instr}")
        for name in sorted(by_index.get(len(self.instructions), ())):
            out.append(f"{name}:")
        return "\n".join(out) + "\n"

    def resolved(self) -> list:
        """Instructions with every BR label replaced by its word offset."""
        out = []
        for i, instr in enumerate(self.instructions):
            if isinstance(instr, Br) and isinstance(instr.target, str):
                instr = Br(instr.flag, self.labels[instr.target] - i)
            out.append(instr)
        return out
