"""Command-line entry point: ``eqasm {asm,disasm,run,dse,validate,example}``.

Exit codes: 0 success, 1 diagnostics or a halted simulation, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, experiments
from .assembler import assemble, disassemble
from .assembler.encoding import from_bytes, is_binary, to_bytes
from .errors import AssemblyError, ConfigError, EqasmError, SimulationError
from .isa import default_config, load_config, validate_config

EXAMPLES = {
    "timeline": lambda: experiments.TIMELINE_LISTING,
    "allxy-fragment": lambda: experiments.ALLXY_FRAGMENT,
    "allxy": experiments.allxy_program,
    "reset": lambda: experiments.ACTIVE_RESET,
    "cfc": experiments.cfc_program,
    "grover": experiments.grover_program,
}


def _config(path):
    return load_config(path) if path else default_config()


def _fail(msg: str) -> int:
    print(f"eqasm: error: {msg}", file=sys.stderr)
    return 1


def _report_assembly(exc: AssemblyError, filename: str) -> None:
    for d in exc.diagnostics:
        print(d.format(filename), file=sys.stderr)


def cmd_asm(args) -> int:
    cfg = _config(args.config)
    text = Path(args.input).read_text()
    try:
        program, words = assemble(text, cfg)
    except AssemblyError as exc:
        _report_assembly(exc, args.input)
        return 1
    for w in program.warnings:
        print(w.format(args.input), file=sys.stderr)
    out = Path(args.output or Path(args.input).with_suffix(".bin"))
    if args.hex:
        out.write_text("".join(f"{w:0{cfg.instruction_width // 4}x}\n" for w in words))
    else:
        out.write_bytes(to_bytes(words, cfg))
    return 0


def cmd_disasm(args) -> int:
    cfg = _config(args.config)
    words = from_bytes(Path(args.input).read_bytes(), cfg)
    text = disassemble(words, cfg)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_program(path: str, cfg):
    data = Path(path).read_bytes()
    if is_binary(data):
        from .assembler import decode
        return decode(from_bytes(data, cfg), cfg)
    program, _ = assemble(data.decode(), cfg)
    return program.resolved()


def cmd_run(args) -> int:
    from .sim import Simulator, load_script
    cfg = _config(args.config)
    try:
        instrs = _load_program(args.program, cfg)
    except AssemblyError as exc:
        _report_assembly(exc, args.program)
        return 1
    script = load_script(args.script) if args.script else None
    sim = Simulator(cfg, instrs, seed=args.seed, script=script, script_mode=args.script_mode,
                    max_cycles=args.max_cycles, start_offset=args.offset)
    trace = sim.run(strict=False)
    if args.trace:
        trace.write(args.trace)
    if args.dump_state:
        Path(args.dump_state).write_text(sim.backend.dump())
    for m in trace.measurements:
        print(f"t={m.timestamp} q{m.qubit} -> {m.result}")
    print(f"cycles: {trace.cycles}")
    if trace.halt is not None:
        print(f"halted: {trace.halt.kind}: {trace.halt.detail}", file=sys.stderr)
        return 1
    return 0


def cmd_dse(args) -> int:
    from .dse import generate_benchmark
    from .dse.sweep import sweep, write_csv
    from .plotting import plot_sweep
    names = ["rb", "parallel", "sequential"] if args.benchmark == "all" else [args.benchmark]
    circuits = {n: generate_benchmark(n, seed=args.seed) for n in names}
    rows = sweep(circuits, setup=args.setup)
    out = Path(args.output)
    write_csv(rows, out)
    if args.check_coupling:
        from .dse import instantiation_for, materialize
        for row in rows:
            circuit = circuits[row.benchmark]
            _, words = assemble(materialize(circuit, row.config), instantiation_for(circuit, row.config))
            expected = row.report.total + (0 if args.setup == "lru" else row.report.setup)
            if len(words) != expected:
                return _fail(f"{row.benchmark} config {row.config_id} w={row.config.w}: "
                             f"{len(words)} words assembled, {expected} counted")
    if not args.no_plot:
        plot_sweep([r.as_dict() for r in rows], out.with_suffix(".png"))
    print(f"{len(rows)} rows written to {out}")
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = _config(args.config)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"{issue.code}: {issue.message}", file=sys.stderr)
        return 1
    issues = validate_config(cfg)
    for issue in issues:
        print(f"{issue.code}: {issue.message}", file=sys.stderr)
    if not issues:
        print(f"ok ({cfg.digest})")
    return 1 if issues else 0


def cmd_example(args) -> int:
    sys.stdout.write(EXAMPLES[args.name]())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqasm", description="eQASM assembler, simulator and design-space tools")
    p.add_argument("--version", action="version",
                   version=f"eqasm {__version__} (default config {default_config().digest})")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", help="instantiation TOML (default: built-in 7-qubit config)")
        return sp

    a = with_config(sub.add_parser("asm", help="assemble text to a binary"))
    a.add_argument("input")
    a.add_argument("-o", "--output")
    a.add_argument("--hex", action="store_true", help="write one hex word per line instead of a binary")
    a.set_defaults(func=cmd_asm)

    d = with_config(sub.add_parser("disasm", help="disassemble a binary"))
    d.add_argument("input")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_disasm)

    r = with_config(sub.add_parser("run", help="simulate a program (binary or text)"))
    r.add_argument("program")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--script", help="scripted measurement results")
    r.add_argument("--script-mode", choices=["postselect", "mock"], default="postselect",
                   help="postselect collapses to the scripted result; mock only reports it")
    r.add_argument("--max-cycles", type=int, default=10 ** 8)
    r.add_argument("--offset", type=int, default=0, help="initial timeline offset in cycles")
    r.add_argument("--trace")
    r.add_argument("--dump-state", metavar="PATH")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("dse", help="instruction-count sweep over configs 1-10 and w=1..4")
    s.add_argument("--benchmark", choices=["rb", "parallel", "sequential", "all"], default="all")
    s.add_argument("--sweep", choices=["default"], default="default")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--setup", choices=["uncounted", "lru"], default="uncounted",
                   help="whether SMIS/SMIT setup counts toward the total")
    s.add_argument("--check-coupling", action="store_true",
                   help="assemble every cell and compare the word count")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_dse)

    v = with_config(sub.add_parser("validate", help="check an instantiation config"))
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("example", help="print a reference program")
    e.add_argument("name", choices=sorted(EXAMPLES))
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, EqasmError) as exc:
        if isinstance(exc, SimulationError):
            raise
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
