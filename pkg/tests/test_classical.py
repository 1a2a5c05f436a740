import numpy as np
import pytest

from eqasm.errors import MemoryOutOfRange, MisalignedAccess, PCOutOfRange
from eqasm.instructions import Alu, Br, Cmp, Ld, Ldi, Ldui, Not, St
from eqasm.sim import ArchState, Simulator, alu, compare, step_classical

N = 100_000


@pytest.fixture(scope="module")
def operands():
    rng = np.random.default_rng(2024)
    a = rng.integers(0, 1 << 32, size=N, dtype=np.uint64).astype(np.uint32)
    b = rng.integers(0, 1 << 32, size=N, dtype=np.uint64).astype(np.uint32)
    # make sure edge cases are present
    a[:4] = [0, 0xFFFFFFFF, 0x80000000, 0x7FFFFFFF]
    b[:4] = [0, 1, 1, 0xFFFFFFFF]
    b[4:100] = a[4:100]
    return a, b


class TestAlu:
    @pytest.mark.parametrize("op,ref", [
        ("ADD", np.add), ("SUB", np.subtract), ("AND", np.bitwise_and),
        ("OR", np.bitwise_or), ("XOR", np.bitwise_xor),
    ])
    def test_against_uint32(self, operands, op, ref):
        a, b = operands
        with np.errstate(over="ignore"):
            expected = ref(a, b).astype(np.uint32)
        got = np.fromiter((alu(op, int(x), int(y)) for x, y in zip(a, b)), dtype=np.uint64, count=N)
        assert np.array_equal(got, expected.astype(np.uint64))

    def test_compare_flags(self, operands):
        a, b = operands
        sa, sb = a.view(np.int32), b.view(np.int32)
        refs = {"EQ": a == b, "NE": a != b, "LT": sa < sb, "GE": sa >= sb, "LE": sa <= sb, "GT": sa > sb,
                "LTU": a < b, "GEU": a >= b, "LEU": a <= b, "GTU": a > b}
        got = [compare(int(x), int(y)) for x, y in zip(a[:20000], b[:20000])]
        for flag, ref in refs.items():
            assert np.array_equal(np.array([g[flag] for g in got]), ref[:20000]), flag
        assert all(g["ALWAYS"] and not g["NEVER"] for g in got)


def state():
    return ArchState(num_qubits=7, data_mem_size=256)


class TestStep:
    def test_ldi_sign_extends(self):
        s = state()
        step_classical(s, Ldi(1, -1))
        assert s.gpr[1] == 0xFFFFFFFF
        assert s.pc == 1

    def test_ldui_concatenates(self):
        s = state()
        s.gpr[2] = 0xFFFFFFFF
        step_classical(s, Ldui(1, 0x7FFF, 2))
        assert s.gpr[1] == 0xFFFFFFFF
        step_classical(s, Ldui(3, 0, 0))
        assert s.gpr[3] == 0

    def test_sub_then_cmp(self):
        s = state()
        s.gpr[1] = s.gpr[2] = 1234
        step_classical(s, Alu("SUB", 3, 1, 2))
        step_classical(s, Cmp(3, 0))
        assert s.gpr[3] == 0 and s.flags["EQ"]

    def test_not(self):
        s = state()
        step_classical(s, Not(1, 0))
        assert s.gpr[1] == 0xFFFFFFFF

    def test_branch_taken_and_not(self):
        s = state()
        s.flags = compare(1, 2)
        step_classical(s, Br("EQ", 5))
        assert s.pc == 1
        step_classical(s, Br("NE", 5))
        assert s.pc == 6

    def test_load_store(self):
        s = state()
        s.gpr[1], s.gpr[2] = 0xDEADBEEF, 16
        step_classical(s, St(1, 2, -4))
        step_classical(s, Ld(3, 2, -4))
        assert s.gpr[3] == 0xDEADBEEF
        assert s.memory[12:16] == bytes([0xEF, 0xBE, 0xAD, 0xDE])

    def test_misaligned(self):
        s = state()
        with pytest.raises(MisalignedAccess):
            step_classical(s, Ld(1, 0, 2))

    def test_out_of_range(self):
        s = state()
        with pytest.raises(MemoryOutOfRange):
            step_classical(s, St(1, 0, 256))

    def test_reset_flags(self):
        s = state()
        assert s.flags["ALWAYS"] and not s.flags["EQ"] and not s.flags["NEVER"]


class TestProgramFlow:
    def test_cmp_eq_after_ldi(self, run):
        sim = run("LDI R0, 1\nLDI R1, 1\nCMP R1, R0\nFBR EQ, R5")
        assert sim.state.gpr[5] == 1

    def test_loop_counts(self, run):
        sim = run("LDI R1, 0\nLDI R2, 1\nLDI R3, 50\nloop: ADD R1, R1, R2\nCMP R1, R3\nBR LT, loop")
        assert sim.state.gpr[1] == 50

    def test_branch_outside(self, run):
        with pytest.raises(PCOutOfRange):
            run("BR ALWAYS, -5")

    def test_empty_program(self, run):
        sim = run("")
        assert sim.trace.events == [] and sim.trace.cycles == 0

    def test_one_instruction_per_cycle(self, cfg):
        from eqasm.assembler import assemble
        prog, _ = assemble("LDI R0, 1\n" * 10, cfg)
        trace = Simulator.from_program(cfg, prog).run()
        assert [e.cycle for e in trace.events] == list(range(10))
