"""Cycle-level microarchitecture simulator."""

from .machine import ArchState, Simulator, TimedMicroOp, alu, compare, run_program, step_classical
from .opsel import MicroCode, microcode_decode, resolve_opsel
from .trace import Trace, TraceEvent, load_script, parse_script, parse_trace

__all__ = ["ArchState", "Simulator", "TimedMicroOp", "alu", "compare", "run_program", "step_classical",
           "MicroCode", "microcode_decode", "resolve_opsel", "Trace", "TraceEvent", "load_script",
           "parse_script", "parse_trace"]
