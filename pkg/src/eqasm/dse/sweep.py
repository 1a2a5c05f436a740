"""Config x VLIW-width sweeps and CSV reports."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from ..errors import IllegalConfig
from .benchmarks import ScheduledCircuit
from .counting import STANDARD_CONFIGS, DseConfig, DseReport, count_instructions

COLUMNS = ["benchmark", "config_id", "w", "w_pi", "scheme", "somq", "total", "qwaits", "bundles",
           "eff_ops_per_bundle", "normalized", "setup", "r_req"]
WIDTHS = (1, 2, 3, 4)


@dataclass
class SweepRow:
    benchmark: str
    config_id: int
    config: DseConfig
    report: DseReport
    normalized: float

    def as_dict(self) -> dict:
        c, r = self.config, self.report
        return {
            "benchmark": self.benchmark, "config_id": self.config_id, "w": c.w, "w_pi": c.w_pi,
            "scheme": c.scheme, "somq": int(c.somq), "total": r.total, "qwaits": r.qwaits,
            "bundles": r.bundles, "eff_ops_per_bundle": f"{r.eff_ops_per_bundle:.4f}",
            "normalized": f"{self.normalized:.4f}", "setup": r.setup, "r_req": f"{r.r_req:.4f}",
        }


def legal_cells(configs: dict[int, DseConfig] | None = None, widths=WIDTHS):
    for cid, cfg in (configs or STANDARD_CONFIGS).items():
        for w in widths:
            try:
                yield cid, cfg.with_width(w).check()
            except IllegalConfig:
                continue


def sweep(circuits: dict[str, ScheduledCircuit], configs: dict[int, DseConfig] | None = None,
          widths=WIDTHS, setup: str = "uncounted") -> list[SweepRow]:
    """Count every legal (config, width) cell; normalize to config 1 at w=1."""
    if not circuits:
        raise ValueError("no circuits to sweep")
    rows = []
    for name, circuit in circuits.items():
        baseline = count_instructions(circuit, STANDARD_CONFIGS[1].with_width(1), setup).total
        for cid, cfg in legal_cells(configs, widths):
            rep = count_instructions(circuit, cfg, setup)
            rows.append(SweepRow(name, cid, cfg, rep, rep.total / baseline))
    return rows


def write_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.as_dict())


def read_csv(path) -> list[dict]:
    with open(Path(path), newline="") as fh:
        return list(csv.DictReader(fh))
