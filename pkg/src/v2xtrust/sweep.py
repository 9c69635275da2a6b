"""Seed-replicated parameter sweeps over the scenario."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .config import ScenarioConfig
from .simulation import run_scenario

SWEEPABLE = ("th_min", "th_max", "rc", "c_w", "malicious_fraction")
METRICS = ("fnr", "fpr", "local_fnr", "local_fpr", "pdr")


@dataclass
class SweepTable:
    parameter: str
    values: List[float]
    repetitions: int
    rows: List[Dict[str, Any]] = field(default_factory=list)
    runs: List[Dict[str, Any]] = field(default_factory=list)

    def column(self, metric: str, stat: str = "mean") -> List[Optional[float]]:
        return [row[metric][stat] for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameter": self.parameter,
            "values": self.values,
            "repetitions": self.repetitions,
            "rows": self.rows,
            "runs": self.runs,
        }


def _one(args):
    config, value, check = args
    report = run_scenario(config, check_invariants=check)
    out = {"value": value, "seed": config.seed}
    out.update({m: getattr(report, m) for m in METRICS})
    out["invariant_violations"] = sum(report.invariants.values())
    return out


def _stats(values: Sequence[Optional[float]]) -> Dict[str, Optional[float]]:
    vals = np.array([v for v in values if v is not None], dtype=float)
    if vals.size == 0:
        return {"mean": None, "std": None, "n": 0}
    std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return {"mean": float(vals.mean()), "std": std, "n": int(vals.size)}


def sweep(
    parameter: str,
    values: Sequence[float],
    base: Optional[ScenarioConfig] = None,
    repetitions: int = 20,
    workers: int = 1,
    check_invariants: bool = False,
) -> SweepTable:
    """Run ``repetitions`` seeds (``base.seed``, ``base.seed + 1``, ...) for every value.

    Not-applicable metrics (e.g. FNR without attackers) are left out of the means.
    """
    if parameter not in SWEEPABLE:
        raise ValueError(f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEPABLE)}")
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    base = base or ScenarioConfig()
    jobs = [
        (base.replace(**{parameter: float(v)}, seed=base.seed + r), float(v), check_invariants)
        for v in values
        for r in range(repetitions)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_one, jobs))
    else:
        runs = [_one(job) for job in jobs]
    runs.sort(key=lambda r: (r["value"], r["seed"]))

    table = SweepTable(parameter, [float(v) for v in values], repetitions, runs=runs)
    for v in table.values:
        subset = [r for r in runs if r["value"] == v]
        row: Dict[str, Any] = {"value": v}
        for m in METRICS:
            row[m] = _stats([r[m] for r in subset])
        table.rows.append(row)
    return table
