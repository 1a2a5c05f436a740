"""Exception hierarchy shared by the toolchain."""

from __future__ import annotations

from dataclasses import dataclass


class EqasmError(Exception):
    """Base class of every error raised by this package."""


class ConfigError(EqasmError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in self.issues))


class NotAnAllowedPair(EqasmError, ValueError):
    pass


class ConflictingPairSelection(EqasmError, ValueError):
    pass


# -- assembler ---------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    code: str
    message: str
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.code}: {self.message}"


class AssemblyError(EqasmError):
    """Raised with every diagnostic collected for a source program."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.format() for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class ImmediateOverflow(EqasmError, ValueError):
    pass


class DecodeError(EqasmError):
    pass


class UnknownOpcode(DecodeError):
    pass


class ConfigHashMismatch(DecodeError):
    pass


# -- simulator ---------------------------------------------------------------


class SimulationError(EqasmError):
    """A condition that stops the quantum processor."""

    def __init__(self, message: str, cycle: int | None = None, qubit: int | None = None,
                 timestamp: int | None = None):
        self.cycle = cycle
        self.qubit = qubit
        self.timestamp = timestamp
        super().__init__(message)


class TimingViolation(SimulationError):
    pass


class LaneConflict(SimulationError):
    pass


class BundleConflict(SimulationError):
    pass


class UnknownQOpcode(SimulationError):
    pass


class PCOutOfRange(SimulationError):
    pass


class MisalignedAccess(SimulationError):
    pass


class MemoryOutOfRange(SimulationError):
    pass


class CycleLimitExceeded(SimulationError):
    pass


class InvalidTargetRegister(SimulationError):
    """A T register selects some qubit through more than one pair."""


class Deadlock(SimulationError):
    pass


class BackendFault(SimulationError):
    """The quantum backend rejected a triggered operation (e.g. an impossible scripted result)."""


# -- quantum backend ---------------------------------------------------------


class BackendError(EqasmError):
    pass


class QubitOutOfRange(BackendError, IndexError):
    pass


class SameQubit(BackendError, ValueError):
    pass


class ZeroProbabilityForcedOutcome(BackendError):
    pass


# -- dse ---------------------------------------------------------------------


class IllegalConfig(EqasmError, ValueError):
    pass
