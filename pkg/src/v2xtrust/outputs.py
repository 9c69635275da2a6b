"""Writers and readers for run and sweep artefacts.

Layout of a run directory::

    config.yaml      the scenario that was run
    summary.json     final metrics, roles, packet and warning counts
    timeseries.csv   step, fnr/fpr per level, cumulative pdr
    trajectory.csv   step, node, x, y, speed (only if recorded)
    figures/*.txt    two-column plot data

A sweep directory holds ``sweep.json``, ``sweep.csv`` and ``figures/*.txt``.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from .config import ScenarioConfig, dump_config
from .simulation import TIMESERIES_FIELDS, MetricsReport
from .sweep import METRICS, SweepTable

OUTPUT_ENV = "V2XTRUST_OUT"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "v2xtrust-out"))


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def _write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _write_columns(path: Path, xs, ys, header: str) -> None:
    lines = [f"# {header}"]
    lines += [f"{_fmt(x)} {_fmt(y) or 'nan'}" for x, y in zip(xs, ys)]
    path.write_text("\n".join(lines) + "\n")


def write_run(report: MetricsReport, config: ScenarioConfig, out_dir) -> Path:
    out = Path(out_dir)
    (out / "figures").mkdir(parents=True, exist_ok=True)
    dump_config(config, out / "config.yaml")
    _write_json(out / "summary.json", report.summary())
    with open(out / "timeseries.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_FIELDS)
        for row in report.timeseries:
            w.writerow([_fmt(row[k]) for k in TIMESERIES_FIELDS])
    if report.trajectory is not None:
        with open(out / "trajectory.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "node", "x", "y", "speed"])
            for row in report.trajectory:
                w.writerow([_fmt(v) for v in row])
    steps = [row["step"] for row in report.timeseries]
    for key in TIMESERIES_FIELDS[1:]:
        _write_columns(out / "figures" / f"{key}.txt", steps, [row[key] for row in report.timeseries], f"step {key}")
    return out


def write_sweep(table: SweepTable, out_dir) -> Path:
    out = Path(out_dir)
    (out / "figures").mkdir(parents=True, exist_ok=True)
    _write_json(out / "sweep.json", table.to_dict())
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = [table.parameter]
        for m in METRICS:
            header += [f"{m}_mean", f"{m}_std", f"{m}_n"]
        w.writerow(header)
        for row in table.rows:
            line = [_fmt(row["value"])]
            for m in METRICS:
                line += [_fmt(row[m]["mean"]), _fmt(row[m]["std"]), _fmt(row[m]["n"])]
            w.writerow(line)
    for m in METRICS:
        _write_columns(
            out / "figures" / f"{table.parameter}_{m}.txt",
            table.values,
            table.column(m),
            f"{table.parameter} {m}_mean",
        )
    return out


def read_results(in_dir) -> Dict[str, Any]:
    """Load whatever run or sweep artefacts exist in ``in_dir``."""
    src = Path(in_dir)
    found: Dict[str, Any] = {}
    for name in ("summary.json", "sweep.json"):
        path = src / name
        if path.exists():
            found[name.split(".")[0]] = json.loads(path.read_text())
    if not found:
        raise FileNotFoundError(f"no summary.json or sweep.json in {src}")
    return found


def format_report(results: Dict[str, Any]) -> str:
    lines = []
    summary: Optional[Dict[str, Any]] = results.get("summary")
    if summary:
        g, l = summary["global"], summary["local"]
        lines.append(f"run seed={summary['seed']}")
        lines.append(f"  global  FNR={_pretty(g['fnr'])}  FPR={_pretty(g['fpr'])}")
        lines.append(f"  local   FNR={_pretty(l['fnr'])}  FPR={_pretty(l['fpr'])}")
        lines.append(f"  PDR={_pretty(summary['pdr'])}  blacklist={summary['global_blacklist']}")
    table = results.get("sweep")
    if table:
        lines.append(f"sweep {table['parameter']} ({table['repetitions']} seeds per value)")
        lines.append("  " + "  ".join(f"{h:>16}" for h in [table["parameter"], *METRICS]))
        for row in table["rows"]:
            cells = [f"{row['value']:>16.4g}"]
            for m in METRICS:
                s = row[m]
                cells.append(f"{_pretty(s['mean'])}±{_pretty(s['std'])}".rjust(16))
            lines.append("  " + "  ".join(cells))
    return "\n".join(lines)


def _pretty(v) -> str:
    return "n/a" if v is None else f"{v:.3f}"
