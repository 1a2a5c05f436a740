import itertools

import pytest

from eqasm.experiments import ACTIVE_RESET, cfc_program
from eqasm.isa import QOpDef


@pytest.fixture(scope="module")
def flag_cfg():
    """Default config plus X variants gated by flags 2 and 3."""
    from eqasm.isa import default_config
    base = default_config()
    extra = (QOpDef("C0_X", 18, "single", flag_select=2, axis=(1, 0, 0), angle=180),
             QOpDef("CE_X", 19, "single", flag_select=3, axis=(1, 0, 0), angle=180))
    return base.replace(operations=base.operations + extra)


def pending_invariant_holds(trace) -> bool:
    """Rebuild Ci from issue/result events; FMR may only retire while Ci == 0."""
    pending: dict[str, int] = {}
    for ev in trace.events:
        if ev.kind == "meas-issue":
            pending[ev.target] = pending.get(ev.target, 0) + 1
        elif ev.kind == "result":
            pending[ev.target] -= 1
            if pending[ev.target] < 0:
                return False
        elif ev.kind == "exec" and ev.detail.startswith("FMR"):
            q = "q" + ev.detail.split("Q")[-1]
            if pending.get(q, 0):
                return False
        elif ev.kind == "stall" and ev.detail.startswith("FMR"):
            if not pending.get(ev.target, 0):
                return False
    return True


class TestExecutionFlags:
    @pytest.mark.parametrize("history", list(itertools.product([0, 1], repeat=2)))
    def test_two_result_histories(self, flag_cfg, run, history):
        text = ("SMIS S0, {0}\nSMIS S1, {1}\nQWAIT 10\nMEASZ S1\nQWAIT 20\nMEASZ S1\nQWAIT 20\n"
                "X S1\nC_X S1\nC0_X S1\nCE_X S1\n")
        sim = run(text, flag_cfg, script={1: list(history)}, script_mode="mock")
        status = {t.op: t.status == "released" for t in sim.trace.triggered() if t.op != "MEASZ"}
        last = history[-1]
        assert status == {"X": True, "C_X": last == 1, "C0_X": last == 0, "CE_X": history[0] == history[1]}

    def test_flags_before_any_measurement(self, flag_cfg, run):
        sim = run("SMIS S0, {0}\nQWAIT 5\nC_X S0\nC0_X S0\nCE_X S0", flag_cfg)
        assert [t.status for t in sim.trace.triggered()] == ["canceled"] * 3

    def test_two_qubit_ignores_flags(self, run):
        sim = run("SMIT T0, {(2, 0)}\nQWAIT 5\nCZ T0")
        assert [t.status for t in sim.trace.triggered()] == ["released", "released"]


class TestActiveReset:
    @pytest.mark.parametrize("seed", range(40))
    def test_correlation(self, run, seed):
        sim = run(ACTIVE_RESET, seed=seed)
        first, second = sim.trace.results(2)
        (cx,) = [t for t in sim.trace.triggered() if t.op == "C_X"]
        assert (cx.status == "released") == (first == 1)
        assert second == 0

    def test_postselected_one(self, run):
        sim = run(ACTIVE_RESET, script={2: [1, 0]})
        assert [t.status for t in sim.trace.triggered() if t.op == "C_X"] == ["released"]

    def test_impossible_script_halts(self, run):
        from eqasm.errors import BackendFault
        with pytest.raises(BackendFault):
            run(ACTIVE_RESET, script={2: [1, 1]})


class TestCfc:
    def test_alternation(self, run):
        results = [0, 1] * 6
        sim = run(cfc_program(12), script={1: results}, script_mode="mock")
        ops = [op for _, q, op in sim.trace.schedule() if q == 0]
        assert ops == ["Y" if r else "X" for r in results]
        assert pending_invariant_holds(sim.trace)

    def test_result_one_takes_eq_path(self, run):
        sim = run(cfc_program(1), script={1: [1]}, script_mode="mock")
        assert [op for _, q, op in sim.trace.schedule() if q == 0] == ["Y"]

    def test_fmr_reads_last_measurement(self, run):
        sim = run("SMIS S1, {1}\nMEASZ S1\nMEASZ S1\nFMR R1, Q1", script={1: [0, 1]}, script_mode="mock")
        assert sim.state.gpr[1] == 1
        assert pending_invariant_holds(sim.trace)
        stall = next(e for e in sim.trace.events if e.kind == "stall")
        fmr = next(e for e in sim.trace.events if e.kind == "exec" and e.detail.startswith("FMR"))
        last_result = [e for e in sim.trace.events if e.kind == "result"][-1]
        assert stall.cycle < last_result.cycle <= fmr.cycle

    def test_fmr_before_measurement(self, run):
        sim = run("LDI R1, 5\nFMR R1, Q3")
        assert sim.state.gpr[1] == 0

    def test_fmr_without_pending_does_not_stall(self, run):
        sim = run("FMR R0, Q0\nFMR R1, Q1")
        assert not any(e.kind == "stall" for e in sim.trace.events)
        assert sim.trace.cycles == 2
