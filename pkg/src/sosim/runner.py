"""Batch scenario execution and cross-coordinator comparison."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .eventlog import EventKind, EventRecord, write_log
from .metrics import MetricsRecord, compute_metrics
from .reasoning import BackendConfig
from .scenario import ScenarioSpec, load_scenario
from .simulation import Simulation


@dataclass
class RunResult:
    spec: ScenarioSpec
    coordinator: str
    records: list[EventRecord]
    metrics: MetricsRecord

    def write(self, path: str | Path) -> None:
        write_log(self.records, str(path))


def demo_scenario_path() -> Path:
    return Path(str(resources.files("sosim.data").joinpath("demo_scenario.json")))


def _as_spec(source: ScenarioSpec | dict[str, Any] | str | Path) -> ScenarioSpec:
    if isinstance(source, ScenarioSpec):
        return source
    return load_scenario(source)


def run_scenario(source: ScenarioSpec | dict[str, Any] | str | Path,
                 coordinator: str = "holonic",
                 backend: BackendConfig | None = None,
                 seed: int | None = None) -> RunResult:
    """Run one scenario deterministically to its horizon.

    The returned record list ends with a MetricSample holding the same
    metrics document as the ``metrics`` field; recomputing offline from the
    persisted log must reproduce it exactly.
    """
    spec = _as_spec(source)
    if seed is not None:
        spec = ScenarioSpec(**{**spec.__dict__, "seed": seed})
    sim = Simulation(spec, coordinator=coordinator, backend=backend)
    records = sim.run()
    metrics = compute_metrics(records)
    sim.runtime.log_event(EventKind.METRIC_SAMPLE, metrics.to_dict())
    return RunResult(spec=spec, coordinator=coordinator, records=records,
                     metrics=metrics)


def compare(sources: list[ScenarioSpec | dict[str, Any] | str | Path],
            coordinators: list[str] = ("holonic", "centralized"),
            backend: BackendConfig | None = None) -> list[dict[str, Any]]:
    """Run every scenario under every coordinator; one metrics row per run."""
    if len(coordinators) < 2:
        raise ValueError("compare requires at least two coordinator variants")
    rows = []
    for source in sources:
        spec = _as_spec(source)
        for coordinator in coordinators:
            result = run_scenario(spec, coordinator=coordinator, backend=backend)
            row: dict[str, Any] = {"scenario": spec.name, "coordinator": coordinator}
            row.update(result.metrics.to_dict())
            rows.append(row)
    return rows
