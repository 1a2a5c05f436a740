import pytest

from eqasm.assembler import parse
from eqasm.errors import AssemblyError
from eqasm.instructions import Br, Bundle, Ldi, QOp, QWait, QWaitR, Smis, Smit


def diag_codes(text, cfg):
    with pytest.raises(AssemblyError) as info:
        parse(text, cfg)
    return info.value.codes


class TestParse:
    def test_smis_then_sop(self, cfg):
        prog = parse("SMIS S7, {0, 1}\nY S7", cfg)
        assert prog.instructions == [Smis(7, (0, 1)), Bundle(1, (QOp("Y", 7, "S"),))]

    def test_qwait_zero(self, cfg):
        assert parse("QWAIT 0", cfg).instructions == [QWait(0)]

    def test_explicit_pi_zero(self, cfg):
        prog = parse("0, CNOT T3 | QNOP", cfg)
        assert prog.instructions == [Bundle(0, (QOp("CNOT", 3, "T"), QOp("QNOP")))]

    def test_default_pi_is_one(self, cfg):
        assert parse("X S0", cfg).instructions[0].pi == 1

    def test_smit_pairs(self, cfg):
        assert parse("SMIT T2, {(2, 0), (3, 1)}", cfg).instructions == [Smit(2, ((2, 0), (3, 1)))]

    def test_comments_and_labels(self, cfg):
        prog = parse("start:  # entry\n  LDI R0, 1  # r0 <- 1\nend: QWAITR R0\nBR ALWAYS, start", cfg)
        assert prog.labels == {"start": 0, "end": 1}
        assert prog.instructions[:2] == [Ldi(0, 1), QWaitR(0)]
        assert prog.resolved()[2] == Br("ALWAYS", -2)

    def test_label_at_end(self, cfg):
        prog = parse("BR EQ, done\ndone:", cfg)
        assert prog.labels["done"] == 1
        assert prog.resolved() == [Br("EQ", 1)]

    def test_mixed_case_mnemonics(self, cfg):
        prog = parse("MeasZ S1\nsmis s1, {1}", cfg)
        assert prog.instructions[0].ops[0].name == "MEASZ"
        assert prog.instructions[1] == Smis(1, (1,))

    def test_hex_immediate(self, cfg):
        assert parse("LDI R3, 0x10", cfg).instructions == [Ldi(3, 16)]

    def test_cfc_listing(self, cfg):
        from eqasm.experiments import cfc_program
        prog = parse(cfc_program(), cfg)
        assert {"loop", "ne_path", "eq_path", "next"} <= set(prog.labels)

    def test_text_roundtrip(self, cfg):
        from eqasm.experiments import cfc_program
        prog = parse(cfc_program(), cfg)
        assert parse(prog.text(), cfg).instructions == prog.instructions


class TestDiagnostics:
    def test_unknown_mnemonic(self, cfg):
        assert diag_codes("FOO S1", cfg) == ["UnknownMnemonic"]

    def test_unresolved_label(self, cfg):
        assert diag_codes("BR EQ, nowhere", cfg) == ["UnresolvedLabel"]

    def test_register_range(self, cfg):
        assert diag_codes("LDI R32, 1", cfg) == ["RegisterOutOfRange"]

    def test_wrong_register_kind(self, cfg):
        assert diag_codes("CZ S1", cfg) == ["WrongRegisterKind"]

    def test_duplicate_label(self, cfg):
        assert diag_codes("a:\nQWAIT 1\na:\n", cfg) == ["DuplicateLabel"]

    def test_syntax_error_position(self, cfg):
        with pytest.raises(AssemblyError) as info:
            parse("QWAIT 1\nSMIS S1, {0, 1", cfg)
        d = info.value.diagnostics[0]
        assert (d.line, d.code) == (2, "SyntaxError")
        assert d.format("x.qisa").startswith("x.qisa:2:")

    def test_collects_all(self, cfg):
        assert diag_codes("FOO\nLDI R99, 0\nBR EQ, nope", cfg) == [
            "UnknownMnemonic", "RegisterOutOfRange", "UnresolvedLabel"]

    def test_pi_placeholder_rejected(self, cfg):
        # "PI" is a placeholder in prose, not a literal
        assert "UnknownMnemonic" in diag_codes("PI, X S5 | H S7 | CNOT T3", cfg)

    def test_wait_slot_needs_instantiation(self, cfg):
        assert diag_codes("0, QWAIT 3 | X S0", cfg) == ["UnknownMnemonic"]
        prog = parse("0, QWAIT 3 | X S0", cfg.replace(bundle_wait_slot=True))
        assert prog.instructions[0].wait == 3
