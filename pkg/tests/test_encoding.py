import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqasm.assembler import assemble, decode, decode_word, disassemble, encode, parse
from eqasm.assembler.encoding import from_bytes, to_bytes
from eqasm.errors import ConfigHashMismatch, DecodeError, ImmediateOverflow, UnknownOpcode
from eqasm.experiments import ALLXY_FRAGMENT
from eqasm.instructions import QWait

from _programs import random_program


def fields(word):
    return {"fmt": word >> 31, "opcode": word >> 25 & 0x3F, "rd": word >> 20 & 0x1F}


class TestLayouts:
    def test_smis_hand_assembled(self, cfg):
        # 0 | SMIS=0x20 | Sd=7 | 13 unused | mask 0b0000101
        expected = (0x20 << 25) | (7 << 20) | 0b0000101
        assert assemble("SMIS S7, {0, 2}", cfg)[1] == [expected]

    def test_smit_mask(self, cfg):
        (word,) = assemble("SMIT T3, {(2, 0)}", cfg)[1]
        assert fields(word) == {"fmt": 0, "opcode": 0x28, "rd": 3}
        assert word & 0xFFFF == 1

    def test_qwait_imm(self, cfg):
        (word,) = assemble("QWAIT 10000", cfg)[1]
        assert word & 0xFFFFF == 10000
        assert fields(word)["opcode"] == cfg.classical_opcodes["QWAIT"]

    def test_qwaitr_field(self, cfg):
        (word,) = assemble("QWAITR R9", cfg)[1]
        assert word >> 15 & 0x1F == 9
        assert word & 0x7FFF == 0

    def test_bundle_fields(self, cfg):
        (word,) = assemble("1, X90 S0 | X S2", cfg)[1]
        assert word >> 31 == 1
        assert word & 0b111 == 1
        assert word >> 22 & 0x1FF == cfg.op("X90").q_opcode
        assert word >> 17 & 0x1F == 0
        assert word >> 8 & 0x1FF == cfg.op("X").q_opcode
        assert word >> 3 & 0x1F == 2

    def test_bundle_bits_reconcatenate(self, cfg):
        (word,) = assemble("5, CZ T3 | MEASZ S9", cfg)[1]
        parts = [(1, 1), (9, cfg.op("CZ").q_opcode), (5, 3), (9, cfg.op("MEASZ").q_opcode), (5, 9), (3, 5)]
        rebuilt = 0
        for width, value in parts:
            rebuilt = rebuilt << width | value
        assert rebuilt == word

    def test_qwait_overflow(self, cfg):
        with pytest.raises(ImmediateOverflow):
            encode([QWait(1 << 20)], cfg)

    def test_branch_offset_signed(self, cfg):
        prog, words = assemble("top: QWAIT 1\nBR NE, top", cfg)
        assert decode(words, cfg)[1].target == -1


class TestDecode:
    def test_all_zero_word(self, cfg):
        with pytest.raises(UnknownOpcode):
            decode_word(0, cfg)

    def test_unknown_q_opcode(self, cfg):
        with pytest.raises(UnknownOpcode):
            decode_word(1 << 31 | 0x1FF << 22, cfg)

    def test_nonzero_unused_bits(self, cfg):
        (word,) = assemble("QWAITR R1", cfg)[1]
        with pytest.raises(DecodeError):
            decode_word(word | 1, cfg)

    def test_allxy_fragment(self, cfg):
        prog, words = assemble(ALLXY_FRAGMENT, cfg)
        assert decode(words, cfg) == prog.resolved()
        assert disassemble(words, cfg).splitlines()[4] == "0, Y S7 | QNOP"

    def test_binary_header(self, cfg):
        _, words = assemble(ALLXY_FRAGMENT, cfg)
        blob = to_bytes(words, cfg)
        assert blob[:4] == b"EQSM"
        assert from_bytes(blob, cfg) == words

    def test_hash_mismatch(self, cfg):
        _, words = assemble("QWAIT 1", cfg)
        with pytest.raises(ConfigHashMismatch):
            from_bytes(to_bytes(words, cfg), cfg.replace(queue_depth=4))

    def test_truncated(self, cfg):
        _, words = assemble("QWAIT 1\nQWAIT 2", cfg)
        with pytest.raises(DecodeError):
            from_bytes(to_bytes(words, cfg)[:-2], cfg)


def check_roundtrip(text, config):
    program, words = assemble(text, config)
    assert decode(words, config) == program.resolved()
    again, words2 = assemble(disassemble(words, config), config)
    assert words2 == words


class TestRoundTrip:
    @given(st.randoms(use_true_random=False))
    @settings(max_examples=200, deadline=None)
    def test_random_programs(self, cfg, rng):
        check_roundtrip(random_program(rng, cfg), cfg)

    @pytest.mark.parametrize("overrides", [
        {"vliw_width": 1}, {"vliw_width": 3, "instruction_width": 64},
        {"vliw_width": 4, "pi_width": 4, "instruction_width": 64}, {"pi_width": 0, "bundle_wait_slot": True},
    ])
    def test_other_instantiations(self, cfg, overrides):
        other = cfg.replace(**overrides)
        rng = random.Random(7)
        for _ in range(50):
            check_roundtrip(random_program(rng, other), other)

    def test_wait_slot_roundtrip(self, cfg):
        other = cfg.replace(pi_width=0, bundle_wait_slot=True)
        check_roundtrip("0, QWAIT 17 | X S0 | Y S1\nQWAIT 40\n0, X S2", other)
        assert parse("0, QWAIT 17 | X S0", other).instructions[0].wait == 17
