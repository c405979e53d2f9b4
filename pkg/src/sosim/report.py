"""Report rendering: delimited tables and matplotlib figures.

The CLI report paths write a CSV next to one PNG per figure so runs can
be compared offline without rerunning anything.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SCALAR_FIELDS = [
    "response_time_mean",
    "response_time_p95",
    "completion_rate",
    "utilization_mean",
    "adaptability_mean",
    "throughput_per_1k",
    "satisfaction_mean",
]


def write_csv(rows: list[dict[str, Any]], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns and not isinstance(row[key], dict):
                columns.append(key)
    with path.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.DictWriter(fp, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in columns})
    return path


def render_table(rows: list[dict[str, Any]]) -> str:
    """Aligned text table of the non-nested row fields."""
    if not rows:
        return "(no rows)"
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns and not isinstance(row[key], dict):
                columns.append(key)

    def fmt(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.3f}"
        return "" if value is None else str(value)

    table = [[fmt(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(line[i]) for line in table)) for i, c in enumerate(columns)]
    out = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    out.append("  ".join("-" * w for w in widths))
    for line in table:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)))
    return "\n".join(out)


def metrics_figures(metrics: dict[str, Any], out_dir: str | Path,
                    prefix: str = "metrics") -> list[Path]:
    """Render standard figures for one run; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    utilization = metrics.get("utilization") or {}
    if utilization:
        fig, ax = plt.subplots(figsize=(max(4, 0.45 * len(utilization)), 3.2))
        names = sorted(utilization)
        ax.bar(range(len(names)), [utilization[n] for n in names], color="#4878cf")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=90, fontsize=7)
        ax.set_ylim(0, 1)
        ax.set_ylabel("utilization")
        ax.set_title("Vehicle utilization")
        fig.tight_layout()
        path = out / f"{prefix}_utilization.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    scalars = [(k, metrics[k]) for k in _SCALAR_FIELDS if metrics.get(k) is not None]
    if scalars:
        fig, ax = plt.subplots(figsize=(6.4, 3.2))
        ax.bar(range(len(scalars)), [v for _, v in scalars], color="#6acc64")
        ax.set_xticks(range(len(scalars)))
        ax.set_xticklabels([k for k, _ in scalars], rotation=30, ha="right", fontsize=8)
        ax.set_title("Run metrics")
        fig.tight_layout()
        path = out / f"{prefix}_summary.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def compare_figures(rows: list[dict[str, Any]], out_dir: str | Path) -> list[Path]:
    """Grouped bars per metric: scenarios on x, one bar per coordinator."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenarios = sorted({r["scenario"] for r in rows})
    coordinators = sorted({r["coordinator"] for r in rows})
    written: list[Path] = []
    for metric in _SCALAR_FIELDS:
        if not any(r.get(metric) is not None for r in rows):
            continue
        fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(scenarios) + 1), 3.2))
        width = 0.8 / max(1, len(coordinators))
        for i, coordinator in enumerate(coordinators):
            values = []
            for scenario in scenarios:
                match = [r for r in rows
                         if r["scenario"] == scenario and r["coordinator"] == coordinator]
                values.append(match[0].get(metric) if match else None)
            xs = [x + i * width for x in range(len(scenarios))]
            ax.bar(xs, [v if v is not None else 0.0 for v in values],
                   width=width, label=coordinator)
        ax.set_xticks([x + 0.4 - width / 2 for x in range(len(scenarios))])
        ax.set_xticklabels(scenarios, rotation=15, ha="right", fontsize=8)
        ax.set_title(metric)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"compare_{metric}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
