"""Assembly text to instruction AST.

Syntax follows the eQASM assembly: one instruction per line, ``#`` starts a
comment, ``name:`` defines a label, and a line that does not start with a
classical or waiting/mask mnemonic is a quantum bundle
``[PI,] op [| op]*``. Mnemonics and register prefixes are case-insensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import AssemblyError, Diagnostic
from ..instructions import (Alu, Br, Bundle, Cmp, Fbr, Fmr, Ld, Ldi, Ldui, Not, QOp, QWait, QWaitR,
                            Smis, Smit, St, WaitSlot)
from ..isa import FLAG_CODES, InstantiationConfig
from .program import Program

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<int>[+-]?(?:0[xX][0-9a-fA-F]+|0[bB][01]+|\d+))
  | (?P<ident>[A-Za-z_.][A-Za-z0-9_.]*)
  | (?P<punct>[,|{}():])
""", re.VERBOSE)

_REG = re.compile(r"([RrSsTtQq])(\d+)$")

_ALU = {"AND", "OR", "XOR", "ADD", "SUB"}
_SINGLE = {"CMP", "BR", "FBR", "LDI", "LDUI", "LD", "ST", "FMR", "NOT", "QWAIT", "QWAITR",
           "SMIS", "SMIT"} | _ALU


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


class _LineError(Exception):
    def __init__(self, code, message, col):
        self.code, self.message, self.col = code, message, col


def _tokenize(line: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise _LineError("SyntaxError", f"unexpected character {line[pos]!r}", pos + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks, config, end_col):
        self.toks, self.i, self.config, self.end_col = toks, 0, config, end_col

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what="token"):
        tok = self.peek()
        if tok is None:
            raise _LineError("SyntaxError", f"expected {what}, found end of line", self.end_col)
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next(repr(text))
        if tok.text != text:
            raise _LineError("SyntaxError", f"expected {text!r}, found {tok.text!r}", tok.col)
        return tok

    def at(self, text):
        tok = self.peek()
        return tok is not None and tok.text == text

    def done(self):
        tok = self.peek()
        if tok is not None:
            raise _LineError("SyntaxError", f"unexpected {tok.text!r}", tok.col)

    def int(self, what="integer"):
        tok = self.next(what)
        if tok.kind != "int":
            raise _LineError("SyntaxError", f"expected {what}, found {tok.text!r}", tok.col)
        return int(tok.text, 0)

    def reg(self, prefix):
        tok = self.next(f"{prefix} register")
        m = _REG.match(tok.text) if tok.kind == "ident" else None
        if not m or m.group(1).upper() != prefix:
            raise _LineError("SyntaxError", f"expected {prefix} register, found {tok.text!r}", tok.col)
        index = int(m.group(2))
        limit = {"R": self.config.num_gprs, "S": self.config.num_sregs,
                 "T": self.config.num_tregs, "Q": self.config.num_qubits}[prefix]
        if index >= limit:
            raise _LineError("RegisterOutOfRange", f"{tok.text} out of range (0..{limit - 1})", tok.col)
        return index

    def flag(self):
        tok = self.next("comparison flag")
        name = tok.text.upper()
        if tok.kind != "ident" or name not in FLAG_CODES:
            raise _LineError("UnknownFlag", f"unknown comparison flag {tok.text!r}", tok.col)
        return name


def _parse_single(name: str, cur: _Cursor, label_refs: list):
    if name == "CMP":
        rs = cur.reg("R"); cur.expect(","); rt = cur.reg("R")
        return Cmp(rs, rt)
    if name == "BR":
        flag = cur.flag(); cur.expect(",")
        tok = cur.next("branch target")
        if tok.kind == "int":
            return Br(flag, int(tok.text, 0))
        if tok.kind != "ident":
            raise _LineError("SyntaxError", f"expected label, found {tok.text!r}", tok.col)
        label_refs.append((tok.text, tok.col))
        return Br(flag, tok.text)
    if name == "FBR":
        flag = cur.flag(); cur.expect(","); rd = cur.reg("R")
        return Fbr(flag, rd)
    if name == "LDI":
        rd = cur.reg("R"); cur.expect(","); imm = cur.int()
        return Ldi(rd, imm)
    if name == "LDUI":
        rd = cur.reg("R"); cur.expect(","); imm = cur.int(); cur.expect(","); rs = cur.reg("R")
        return Ldui(rd, imm, rs)
    if name in ("LD", "ST"):
        r = cur.reg("R"); cur.expect(","); rt = cur.reg("R"); cur.expect("(")
        imm = cur.int(); cur.expect(")")
        return Ld(r, rt, imm) if name == "LD" else St(r, rt, imm)
    if name == "FMR":
        rd = cur.reg("R"); cur.expect(","); q = cur.reg("Q")
        return Fmr(rd, q)
    if name in _ALU:
        rd = cur.reg("R"); cur.expect(","); rs = cur.reg("R"); cur.expect(","); rt = cur.reg("R")
        return Alu(name, rd, rs, rt)
    if name == "NOT":
        rd = cur.reg("R"); cur.expect(","); rt = cur.reg("R")
        return Not(rd, rt)
    if name == "QWAIT":
        col = cur.peek().col if cur.peek() else cur.end_col
        imm = cur.int("wait time")
        if imm < 0:
            raise _LineError("SyntaxError", "wait time must be non-negative", col)
        return QWait(imm)
    if name == "QWAITR":
        return QWaitR(cur.reg("R"))
    if name == "SMIS":
        sd = cur.reg("S"); cur.expect(","); cur.expect("{")
        qubits = []
        while not cur.at("}"):
            qubits.append(cur.int("qubit address"))
            if not cur.at("}"):
                cur.expect(",")
        cur.expect("}")
        return Smis(sd, tuple(sorted(set(qubits))))
    if name == "SMIT":
        td = cur.reg("T"); cur.expect(","); cur.expect("{")
        pairs = []
        while not cur.at("}"):
            cur.expect("("); a = cur.int("qubit address"); cur.expect(",")
            b = cur.int("qubit address"); cur.expect(")")
            pairs.append((a, b))
            if not cur.at("}"):
                cur.expect(",")
        cur.expect("}")
        return Smit(td, tuple(pairs))
    raise AssertionError(name)


def _parse_slot(cur: _Cursor, config: InstantiationConfig):
    tok = cur.next("quantum operation")
    if tok.kind != "ident":
        raise _LineError("SyntaxError", f"expected quantum operation, found {tok.text!r}", tok.col)
    if tok.text.upper() == "QWAIT":
        if not config.bundle_wait_slot:
            raise _LineError("UnknownMnemonic", "QWAIT is not allowed inside a bundle in this instantiation",
                             tok.col)
        return WaitSlot(cur.int("wait time"))
    op = config.op(tok.text)
    if op is None:
        raise _LineError("UnknownMnemonic", f"unknown quantum operation {tok.text!r}", tok.col)
    if op.kind == "qnop":
        return QOp(op.mnemonic)
    prefix = "T" if op.needs_treg else "S"
    nxt = cur.peek()
    if nxt is None or nxt.text in ("|",):
        raise _LineError("SyntaxError", f"{op.mnemonic} needs an {prefix} register operand",
                         nxt.col if nxt else cur.end_col)
    m = _REG.match(nxt.text) if nxt.kind == "ident" else None
    if m and m.group(1).upper() in "ST" and m.group(1).upper() != prefix:
        raise _LineError("WrongRegisterKind",
                         f"{op.mnemonic} is a {op.kind} operation and needs an {prefix} register", nxt.col)
    return QOp(op.mnemonic, cur.reg(prefix), prefix)


def _parse_bundle(cur: _Cursor, config: InstantiationConfig) -> Bundle:
    pi = 1
    first = cur.peek()
    if first.kind == "int":
        pi = cur.int()
        if pi < 0:
            raise _LineError("SyntaxError", "PI must be non-negative", first.col)
        cur.expect(",")
    ops = [_parse_slot(cur, config)]
    while cur.at("|"):
        cur.next()
        ops.append(_parse_slot(cur, config))
    cur.done()
    return Bundle(pi, tuple(ops))


def parse(text: str, config: InstantiationConfig) -> Program:
    """Parse assembly text. Raises :class:`AssemblyError` with every diagnostic."""
    prog = Program()
    diags: list[Diagnostic] = []
    refs: list[tuple[str, int, int]] = []
    label_lines: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        try:
            toks = _tokenize(line)
            while len(toks) >= 2 and toks[0].kind == "ident" and toks[1].text == ":":
                name = toks[0].text
                if name in prog.labels:
                    diags.append(Diagnostic(lineno, toks[0].col, "DuplicateLabel",
                                            f"label {name!r} already defined on line {label_lines[name]}"))
                else:
                    prog.labels[name] = len(prog.instructions)
                    label_lines[name] = lineno
                toks = toks[2:]
            if not toks:
                continue
            cur = _Cursor(toks, config, len(line.rstrip()) + 1)
            head = toks[0]
            line_refs: list = []
            if head.kind == "ident" and head.text.upper() in _SINGLE:
                cur.next()
                instr = _parse_single(head.text.upper(), cur, line_refs)
                cur.done()
            elif head.kind in ("ident", "int"):
                instr = _parse_bundle(cur, config)
            else:
                raise _LineError("SyntaxError", f"unexpected {head.text!r}", head.col)
        except _LineError as err:
            diags.append(Diagnostic(lineno, err.col, err.code, err.message))
            continue
        refs.extend((name, lineno, col) for name, col in line_refs)
        prog.instructions.append(instr)
        prog.lines.append(lineno)

    for name, lineno, col in refs:
        if name not in prog.labels:
            diags.append(Diagnostic(lineno, col, "UnresolvedLabel", f"undefined label {name!r}"))
    if diags:
        raise AssemblyError(sorted(diags, key=lambda d: (d.line, d.col)))
    return prog
