"""Instruction-count design-space exploration."""

from .benchmarks import (CLIFFORD_DECOMPOSITIONS, Gate, ScheduledCircuit, generate_benchmark, parallel_like,
                         rb_like, sequential_like)
from .counting import STANDARD_CONFIGS, DseConfig, DseReport, count_instructions, instantiation_for, materialize

__all__ = ["CLIFFORD_DECOMPOSITIONS", "Gate", "ScheduledCircuit", "generate_benchmark", "parallel_like",
           "rb_like", "sequential_like", "STANDARD_CONFIGS", "DseConfig", "DseReport", "count_instructions",
           "instantiation_for", "materialize"]
