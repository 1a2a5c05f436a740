"""Assembler and disassembler for eQASM text and binaries."""

from .encoding import decode, decode_word, encode, encode_instruction, read_binary, write_binary
from .parser import parse
from .passes import legalize, split_bundle, split_bundles
from .program import Program


def assemble(text: str, config):
    """Parse, legalize and split ``text``; return ``(program, words)``."""
    program = split_bundles(legalize(parse(text, config), config), config)
    return program, encode(program, config)


def disassemble(words, config) -> str:
    return "".join(f"{instr}\n" for instr in decode(words, config))


__all__ = ["Program", "assemble", "decode", "decode_word", "disassemble", "encode", "encode_instruction",
           "legalize", "parse", "read_binary", "split_bundle", "split_bundles", "write_binary"]
