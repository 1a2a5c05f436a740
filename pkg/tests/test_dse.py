import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqasm.assembler import assemble
from eqasm.dse import (STANDARD_CONFIGS, DseConfig, Gate, ScheduledCircuit, count_instructions,
                       instantiation_for, materialize, rb_like)
from eqasm.dse.counting import r_req
from eqasm.dse.sweep import COLUMNS, legal_cells, read_csv, sweep, write_csv
from eqasm.errors import IllegalConfig
from eqasm.isa import surface7_topology

TOPO = surface7_topology()


def random_circuit(seed, points=12, max_gap=20):
    """Scheduled circuit on the 7-qubit chip with no qubit used twice per point."""
    rng = np.random.default_rng(seed)
    gates, t = [], 0
    for _ in range(points):
        t += int(rng.integers(0, max_gap)) if gates else int(rng.integers(0, 3))
        free = set(range(7))
        for _ in range(int(rng.integers(1, 6))):
            if rng.random() < 0.3:
                src, tgt = TOPO.edges[rng.integers(0, TOPO.num_edges)]
                if src in free and tgt in free:
                    gates.append(Gate(t, "CZ", (src, tgt)))
                    free -= {src, tgt}
            elif free:
                q = int(rng.choice(sorted(free)))
                gates.append(Gate(t, ["X", "Y", "X90"][rng.integers(0, 3)], (q,)))
                free.discard(q)
        t += 2  # leave room for CZ
    return ScheduledCircuit(7, gates, TOPO, "random")


def cells():
    return [cfg for _, cfg in legal_cells()]


class TestMinimal:
    def test_one_op_config1(self):
        c = ScheduledCircuit(7, [Gate(1, "X", (0,))], TOPO)
        rep = count_instructions(c, STANDARD_CONFIGS[1].with_width(1))
        assert (rep.qwaits, rep.bundles, rep.total) == (1, 1, 2)

    def test_op_at_origin_needs_no_wait(self):
        c = ScheduledCircuit(7, [Gate(0, "X", (0,))], TOPO)
        assert count_instructions(c, STANDARD_CONFIGS[1]).total == 1

    def test_two_qubit_rb_strictly_decreases(self):
        c = rb_like(num_cliffords=27, num_qubits=2, seed=0, recovery=False)
        assert 90 <= len(c.gates) <= 110
        totals = [count_instructions(c, STANDARD_CONFIGS[1].with_width(w)).total for w in (1, 2, 3, 4)]
        # oracle: qubits run in lockstep until the shorter stream ends
        points = c.points()
        expected = [sum(int(d > 0) + math.ceil(len(g) / w)
                        for d, (_, g) in zip([points[0][0]] + [b[0] - a[0] for a, b in zip(points, points[1:])], points))
                    for w in (1, 2, 3, 4)]
        assert totals == expected
        assert totals[3] < totals[0]


class TestSchemes:
    @pytest.mark.parametrize("d,ts1,ts2", [(0, 1, 1), (1, 3, 2), (31, 3, 2), (32, 3, 3)])
    def test_wait_placement(self, d, ts1, ts2):
        c = ScheduledCircuit(7, [Gate(0, "X", (0,)), Gate(d, "Y", (1,))], TOPO)
        assert count_instructions(c, DseConfig("ts1", w=2)).total == ts1
        assert count_instructions(c, DseConfig("ts2", w=2)).total == ts2

    @pytest.mark.parametrize("w_pi", [1, 2, 3, 4])
    def test_ts3_threshold(self, w_pi):
        limit = (1 << w_pi) - 1
        for d, extra in ((limit, 0), (limit + 1, 1)):
            c = ScheduledCircuit(7, [Gate(0, "X", (0,)), Gate(d, "X", (0,))], TOPO)
            assert count_instructions(c, DseConfig("ts3", w_pi)).total == 2 + extra

    def test_somq_merges_same_mnemonic(self):
        c = ScheduledCircuit(7, [Gate(0, "X", (q,)) for q in range(7)], TOPO)
        assert count_instructions(c, DseConfig("ts3", 1, somq=True)).bundles == 1
        assert count_instructions(c, DseConfig("ts3", 1)).bundles == 7


class TestIllegal:
    @pytest.mark.parametrize("cfg", [DseConfig("ts4"), DseConfig("ts1", w=5), DseConfig("ts2", w=1),
                                     DseConfig("ts3"), DseConfig("ts1", w_pi=2), DseConfig("ts3", 5)])
    def test_rejected(self, cfg):
        with pytest.raises(IllegalConfig):
            count_instructions(ScheduledCircuit(7, [], TOPO), cfg)

    def test_unknown_setup_mode(self):
        with pytest.raises(IllegalConfig):
            count_instructions(ScheduledCircuit(7, [], TOPO), STANDARD_CONFIGS[1], setup="eager")

    def test_grid_shape(self):
        grid = list(legal_cells())
        assert len(grid) == 39
        assert {cid for cid, cfg in grid if cfg.w == 1} == {1, 3, 4, 5, 6, 7, 8, 9, 10}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_dominance_properties(seed):
    c = random_circuit(seed)
    for setup in ("uncounted", "lru"):
        for cid, cfg in STANDARD_CONFIGS.items():
            totals = [count_instructions(c, cfg.with_width(w), setup).total
                      for w in (1, 2, 3, 4) if cid != 2 or w > 1]
            assert totals == sorted(totals, reverse=True)
        for w in (2, 3, 4):
            assert (count_instructions(c, STANDARD_CONFIGS[2].with_width(w), setup).total
                    <= count_instructions(c, STANDARD_CONFIGS[1].with_width(w), setup).total)
    for k in range(1, 5):
        for w in (1, 2, 3, 4):
            plain = count_instructions(c, DseConfig("ts3", k, w=w)).total
            assert count_instructions(c, DseConfig("ts3", k, somq=True, w=w)).total <= plain


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_coupling_with_assembler(seed):
    c = random_circuit(seed, points=8, max_gap=40)
    for cfg in cells():
        rep = count_instructions(c, cfg)
        _, words = assemble(materialize(c, cfg), instantiation_for(c, cfg))
        assert len(words) == rep.total + rep.setup


def test_report_additive():
    rep = count_instructions(random_circuit(3), STANDARD_CONFIGS[9].with_width(2))
    assert rep.total == rep.qwaits + rep.bundles
    assert rep.eff_ops_per_bundle <= 2 * 7


def test_r_req_window():
    assert r_req([(0, 4), (10, 4), (40, 4)], window=32) == 8 / 32
    assert r_req([]) == 0.0


class TestSweep:
    def test_deterministic_and_normalized(self):
        circuits = {"a": random_circuit(1), "b": random_circuit(2)}
        rows1 = [r.as_dict() for r in sweep(circuits)]
        rows2 = [r.as_dict() for r in sweep(circuits)]
        assert rows1 == rows2
        assert len(rows1) == 2 * 39
        base = [r for r in rows1 if r["config_id"] == 1 and r["w"] == 1]
        assert all(r["normalized"] == "1.0000" for r in base)

    def test_csv_round_trip(self, tmp_path):
        rows = sweep({"x": random_circuit(5)})
        path = tmp_path / "out.csv"
        write_csv(rows, path)
        back = read_csv(path)
        assert list(back[0]) == COLUMNS
        assert [int(r["total"]) for r in back] == [r.report.total for r in rows]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            sweep({})
