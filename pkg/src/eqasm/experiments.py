"""Generators for the reference eQASM programs used in regression tests.

All programs target the default 7-qubit instantiation unless noted.
"""

from __future__ import annotations

# (first, second) gate of each AllXY step, with the ideal P(|1>) after it.
ALLXY_PAIRS = [
    ("I", "I"), ("X", "X"), ("Y", "Y"), ("X", "Y"), ("Y", "X"),
    ("X90", "I"), ("Y90", "I"), ("X90", "Y90"), ("Y90", "X90"), ("X90", "Y"), ("Y90", "X"),
    ("X", "Y90"), ("Y", "X90"), ("X90", "X"), ("X", "X90"), ("Y90", "Y"), ("Y", "Y90"),
    ("X", "I"), ("Y", "I"), ("X90", "X90"), ("Y90", "Y90"),
]
ALLXY_EXPECTED = [0.0] * 5 + [0.5] * 12 + [1.0] * 4

TIMELINE_LISTING = """\
SMIS S0, {0}
SMIS S1, {1}
SMIS S2, {2}
SMIS S3, {3}
LDI  R0, 1
X    S0        # PI defaults to 1
Y    S1
QWAITR R0      # register-valued wait
0, X90 S2
QWAIT 0        # no new timing point
1, Y90 S3
"""

ALLXY_FRAGMENT = """\
SMIS S0, {0}
SMIS S2, {2}
SMIS S7, {0, 2}
QWAIT    10000
0, Y     S7
1, X90   S0  | X  S2
1, MEASZ S7
QWAIT    50
"""

ACTIVE_RESET = """\
SMIS   S2, {2}
QWAIT  10000
X90    S2
MEASZ  S2
QWAIT  50
C_X    S2
MEASZ  S2
"""


def cfc_program(iterations: int = 10) -> str:
    """Measure qubit 1, then apply Y on qubit 0 if the result was 1, else X; repeated."""
    return f"""\
  SMIS  S0, {{0}}
  SMIS  S1, {{1}}
  LDI   R0, 1
  LDI   R2, 0           # iteration counter
  LDI   R3, {iterations}
  LDI   R4, 1
loop:
  MEASZ S1
  QWAIT 30
  FMR   R1, Q1          # blocks until the result is back
  CMP   R1, R0
  BR    EQ, eq_path
ne_path:
  X     S0
  BR    ALWAYS, next
eq_path:
  Y     S0
next:
  ADD   R2, R2, R4
  CMP   R2, R3
  BR    LT, loop
"""


def _step(a: str, b: str, pi: int) -> str:
    if a == b:
        return f"{pi}, {a} S7"
    return f"{pi}, {a} S0 | {b} S2"


def allxy_program(q2_reversed: bool = True) -> str:
    """Two-qubit AllXY on qubits 0 and 2.

    Qubit 0 walks the 21 pairs in order, qubit 2 in reverse order when
    ``q2_reversed``. Each step ends with a conditional C_X so the next step
    starts from |0> (an ideal simulation has no relaxation during idling).
    """
    lines = ["SMIS S0, {0}", "SMIS S2, {2}", "SMIS S7, {0, 2}"]
    n = len(ALLXY_PAIRS)
    for k, (a0, b0) in enumerate(ALLXY_PAIRS):
        a2, b2 = ALLXY_PAIRS[n - 1 - k] if q2_reversed else (a0, b0)
        lines += [
            "QWAIT    10000",
            _step(a0, a2, 0),
            _step(b0, b2, 1),
            "1, MEASZ S7",
            "QWAIT    50",
            "C_X      S7",
        ]
    return "\n".join(lines) + "\n"


def allxy_expected(q2_reversed: bool = True) -> tuple[list[float], list[float]]:
    q2 = ALLXY_EXPECTED[::-1] if q2_reversed else list(ALLXY_EXPECTED)
    return list(ALLXY_EXPECTED), q2


def grover_program(marked: int = 3) -> str:
    """Two-qubit Grover search on qubits 0 (bit 0) and 2 (bit 1) with one iteration.

    Uses Y90 in place of Hadamard: the diffusion operator is conjugated by
    Y90 on the way out and Ym90 on the way in.
    """
    flip = [q for q, bit in ((0, marked & 1), (2, marked >> 1 & 1)) if not bit]
    flip_reg = {(0,): "S0", (2,): "S2", (0, 2): "S7"}.get(tuple(flip))
    lines = ["SMIS S0, {0}", "SMIS S2, {2}", "SMIS S7, {0, 2}", "SMIT T0, {(2, 0)}", "QWAIT 100",
             "Y90 S7"]
    if flip_reg:
        lines += [f"X {flip_reg}", "CZ T0", f"2, X {flip_reg}"]
    else:
        lines += ["CZ T0"]
    lines += [
        f"{1 if flip_reg else 2}, Ym90 S7",
        "X S7",
        "CZ T0",
        "2, X S7",
        "Y90 S7",
        "MEASZ S7",
    ]
    return "\n".join(lines) + "\n"


def issue_rate_program(pi: int, repeats: int = 20, lead: int = 5) -> str:
    """Back-to-back three-operation bundles; needs a VLIW width of 1 to stress issue.

    With ``pi=1`` the timeline advances one cycle per bundle while each bundle
    splits into three words, so the required issue rate exceeds one word per
    cycle. ``pi >= 3`` keeps up.
    """
    lines = ["SMIS S0, {0}", "SMIS S1, {1}", "SMIS S2, {2}", f"QWAIT {lead}"]
    lines += [f"{pi}, X S0 | Y S1 | X90 S2"] * repeats
    return "\n".join(lines) + "\n"
