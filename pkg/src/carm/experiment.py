"""Batch replication harness.

A plan sweeps datasets x objective sets, repeating each cell with seeds
base_seed, base_seed+1, ... and aggregating rule-store size, dominator
count, wall time and accuracy per cell. trend_check condenses a report
into per-dataset verdict booleans about how those aggregates move as the
objective count grows.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import dataset as ds
from .evolution import (
    ConfigError,
    RunConfig,
    RunResult,
    parse_metrics,
    parse_schema,
    run,
)
from .rules import MetricSpec, RuleSchema

log = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"
FRONTS_DIR = "fronts"


class InsufficientCoverageError(ValueError):
    """trend_check needs at least two objective-set sizes per dataset."""


@dataclass(frozen=True)
class ExperimentPlan:
    """Sweep description. schemas apply only to cells whose objective set
    includes rule_difference; other cells run schema-free."""

    datasets: tuple = ("iris",)
    objective_sets: tuple = ()
    repetitions: int = 10
    base_seed: int = 0
    base: RunConfig = field(default_factory=RunConfig)
    schemas: dict = field(default_factory=dict)  # dataset name -> RuleSchema
    probe_objectives: Optional[tuple] = None     # reported, never asserted
    probe_generations: int = 10

    def validate(self) -> list:
        errors = []
        if not self.datasets:
            errors.append(("datasets", "at least one dataset is required"))
        if not self.objective_sets:
            errors.append(("objective_sets", "at least one objective set is required"))
        for i, objs in enumerate(self.objective_sets):
            if not objs:
                errors.append(("objective_sets", f"objective set {i} is empty"))
        if self.repetitions < 1:
            errors.append(("repetitions", "repetitions must be at least 1"))
        if self.probe_generations < 1:
            errors.append(("probe_generations", "probe_generations must be at least 1"))
        for name, schema in self.schemas.items():
            if not isinstance(schema, RuleSchema):
                errors.append(("schemas", f"schema for {name!r} is not a rule schema"))
        return errors

    def require_valid(self):
        errors = self.validate()
        if errors:
            raise ConfigError(errors)

    def cell_config(self, dataset: str, objectives: tuple, rep: int,
                    probe: bool = False) -> RunConfig:
        needs_schema = any(m.name == "rule_difference" for m in objectives)
        cfg = replace(
            self.base,
            dataset=dataset,
            metrics=tuple(objectives),
            rng_seed=self.base_seed + rep,
            schema=self.schemas.get(dataset) if needs_schema else None,
            population_size=self.base.population_size,
        )
        if probe:
            cfg = replace(cfg, generations=self.probe_generations)
        return cfg

    def to_dict(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "objective_sets": [
                [{"name": m.name, "maximize": m.maximize} for m in objs]
                for objs in self.objective_sets
            ],
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "base": self.base.to_dict(),
            "schemas": {
                name: {"pattern": list(s.pattern), "class_code": s.class_code}
                for name, s in self.schemas.items()
            },
            "probe_objectives": None if self.probe_objectives is None else [
                {"name": m.name, "maximize": m.maximize}
                for m in self.probe_objectives
            ],
            "probe_generations": self.probe_generations,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentPlan":
        if not isinstance(raw, dict):
            raise ConfigError([("plan", "plan must be a JSON object")])
        known = {
            "datasets", "objective_sets", "repetitions", "base_seed",
            "base", "schemas", "probe_objectives", "probe_generations",
        }
        errors = [(k, f"unknown plan key {k!r}") for k in raw if k not in known]
        if errors:
            raise ConfigError(errors)

        datasets = raw.get("datasets", ["iris"])
        if not isinstance(datasets, list) or not all(isinstance(d, str) for d in datasets):
            errors.append(("datasets", "datasets must be a list of names"))
            datasets = []

        objective_sets = []
        raw_sets = raw.get("objective_sets", [])
        if not isinstance(raw_sets, list):
            errors.append(("objective_sets", "objective_sets must be a list of metric lists"))
        else:
            for i, entry in enumerate(raw_sets):
                try:
                    objective_sets.append(parse_metrics(entry))
                except ValueError as exc:
                    errors.append(("objective_sets", f"set {i}: {exc}"))

        repetitions = raw.get("repetitions", 10)
        if not isinstance(repetitions, int) or isinstance(repetitions, bool):
            errors.append(("repetitions", "repetitions must be an integer"))
            repetitions = 10
        base_seed = raw.get("base_seed", 0)
        if not isinstance(base_seed, int) or isinstance(base_seed, bool):
            errors.append(("base_seed", "base_seed must be an integer"))
            base_seed = 0

        base = RunConfig()
        if "base" in raw and raw["base"] is not None:
            try:
                base = RunConfig.from_dict(raw["base"])
            except ConfigError as exc:
                errors.extend(("base." + f, m) for f, m in exc.errors)

        schemas = {}
        raw_schemas = raw.get("schemas", {})
        if not isinstance(raw_schemas, dict):
            errors.append(("schemas", "schemas must map dataset names to schema objects"))
        else:
            for name, entry in raw_schemas.items():
                try:
                    schemas[name] = parse_schema(entry)
                except ValueError as exc:
                    errors.append(("schemas", f"{name}: {exc}"))

        probe = None
        if raw.get("probe_objectives") is not None:
            try:
                probe = parse_metrics(raw["probe_objectives"])
            except ValueError as exc:
                errors.append(("probe_objectives", str(exc)))
        probe_generations = raw.get("probe_generations", 10)
        if not isinstance(probe_generations, int) or isinstance(probe_generations, bool):
            errors.append(("probe_generations", "probe_generations must be an integer"))
            probe_generations = 10

        if errors:
            raise ConfigError(errors)
        plan = cls(
            datasets=tuple(datasets),
            objective_sets=tuple(objective_sets),
            repetitions=repetitions,
            base_seed=base_seed,
            base=base,
            schemas=schemas,
            probe_objectives=probe,
            probe_generations=probe_generations,
        )
        plan.require_valid()
        return plan


@dataclass(frozen=True)
class RepetitionRow:
    """Raw measurements of one run."""

    dataset: str
    n_attributes: int
    n_instances: int
    n_objectives: int
    repetition: int
    seed: int
    rules_rks: int
    rules_hks: int
    cpu_time_ms: float
    accuracy: float
    train_accuracy: float
    front_size: int
    probe: bool = False

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_attributes": self.n_attributes,
            "n_instances": self.n_instances,
            "n_objectives": self.n_objectives,
            "repetition": self.repetition,
            "seed": self.seed,
            "rules_rks": self.rules_rks,
            "rules_hks": self.rules_hks,
            "cpu_time_ms": self.cpu_time_ms,
            "accuracy": self.accuracy,
            "train_accuracy": self.train_accuracy,
            "front_size": self.front_size,
            "probe": self.probe,
        }


@dataclass(frozen=True)
class CellAggregate:
    """Mean and population standard deviation over one cell's repetitions."""

    dataset: str
    n_attributes: int
    n_instances: int
    n_objectives: int
    metric_names: tuple
    repetitions: int
    rules_rks: Tuple[float, float]
    rules_hks: Tuple[float, float]
    cpu_time_ms: Tuple[float, float]
    accuracy: Tuple[float, float]
    train_accuracy: Tuple[float, float]
    probe: bool = False

    def to_dict(self) -> dict:
        def pair(p):
            return {"mean": p[0], "sd": p[1]}

        return {
            "dataset": self.dataset,
            "n_attributes": self.n_attributes,
            "n_instances": self.n_instances,
            "n_objectives": self.n_objectives,
            "metric_names": list(self.metric_names),
            "repetitions": self.repetitions,
            "rules_rks": pair(self.rules_rks),
            "rules_hks": pair(self.rules_hks),
            "cpu_time_ms": pair(self.cpu_time_ms),
            "accuracy": pair(self.accuracy),
            "train_accuracy": pair(self.train_accuracy),
            "probe": self.probe,
        }


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    rows: List[RepetitionRow]
    cells: List[CellAggregate]
    fronts: Dict[tuple, list]  # (dataset, n_objectives) -> front dump rows

    def cell(self, dataset: str, n_objectives: int) -> Optional[CellAggregate]:
        for c in self.cells:
            if c.dataset == dataset and c.n_objectives == n_objectives and not c.probe:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "plan": self.plan.to_dict(),
            "rows": [r.to_dict() for r in self.rows],
            "cells": [c.to_dict() for c in self.cells],
            "fronts": {
                f"{dataset}:{n}" + (":probe" if probe else ""): rows
                for (dataset, n, probe), rows in self.fronts.items()
            },
            "trends": {
                name: dict(v) for name, v in trend_check(self, strict=False).items()
            },
        }


def _aggregate(rows: Sequence[RepetitionRow]) -> CellAggregate:
    def stats(vals):
        vals = list(vals)
        return (statistics.mean(vals), statistics.pstdev(vals))

    first = rows[0]
    return CellAggregate(
        dataset=first.dataset,
        n_attributes=first.n_attributes,
        n_instances=first.n_instances,
        n_objectives=first.n_objectives,
        metric_names=(),
        repetitions=len(rows),
        rules_rks=stats(r.rules_rks for r in rows),
        rules_hks=stats(r.rules_hks for r in rows),
        cpu_time_ms=stats(r.cpu_time_ms for r in rows),
        accuracy=stats(r.accuracy for r in rows),
        train_accuracy=stats(r.train_accuracy for r in rows),
        probe=first.probe,
    )


def _front_dump(result: RunResult) -> list:
    from .render import true_vector

    return [
        {
            "rule_id": rid,
            "rule": str(result.beliefs.rule(rid)),
            "metrics": list(true_vector(result, rid)),
        }
        for rid in result.final_front
    ]


def run_plan(
    plan: ExperimentPlan,
    out_dir: Optional[str] = None,
    on_progress: Optional[Callable[[RepetitionRow], None]] = None,
) -> ExperimentReport:
    """Execute every cell in deterministic order and aggregate.

    With out_dir set, a failure mid-sweep persists the partial report
    before the error propagates.
    """
    plan.require_valid()
    rows: List[RepetitionRow] = []
    cells: List[CellAggregate] = []
    fronts: Dict[tuple, list] = {}
    report = ExperimentReport(plan=plan, rows=rows, cells=cells, fronts=fronts)

    datasets = {}
    try:
        for name in plan.datasets:
            datasets[name] = ds.resolve_dataset(name)

        jobs = [(name, objs, False) for name in plan.datasets
                for objs in plan.objective_sets]
        if plan.probe_objectives:
            jobs += [(name, plan.probe_objectives, True) for name in plan.datasets]

        for name, objs, probe in jobs:
            data = datasets[name]
            cell_rows = []
            for rep in range(plan.repetitions):
                cfg = plan.cell_config(name, objs, rep, probe=probe)
                result = run(cfg, data=data)
                row = RepetitionRow(
                    dataset=name,
                    n_attributes=data.n_attributes,
                    n_instances=len(data.instances),
                    n_objectives=len(objs),
                    repetition=rep,
                    seed=cfg.rng_seed,
                    rules_rks=result.rks_count,
                    rules_hks=result.hks_count,
                    cpu_time_ms=result.total_wall_ms,
                    accuracy=result.accuracy,
                    train_accuracy=result.train_accuracy,
                    front_size=len(result.final_front),
                    probe=probe,
                )
                cell_rows.append(row)
                rows.append(row)
                if on_progress is not None:
                    on_progress(row)
                if rep == 0:
                    fronts[(name, len(objs), probe)] = _front_dump(result)
                if probe:
                    break  # one probe repetition per dataset is plenty
            agg = replace(
                _aggregate(cell_rows),
                metric_names=tuple(m.name for m in objs),
            )
            cells.append(agg)
    except Exception:
        if out_dir is not None and rows:
            log.exception("sweep aborted; persisting partial report")
            write_experiment_artifacts(report, out_dir, partial=True)
        raise
    return report


# ---------------------------------------------------------------------------
# Trend verdicts
# ---------------------------------------------------------------------------


def trend_check(report: ExperimentReport, strict: bool = True) -> dict:
    """Per-dataset verdicts on how aggregates move with the objective count.

    dominators_shrink: mean dominator count strictly decreases at every
      step of the size-ordered objective sets.
    accuracy_peak_at_four: the 4-objective cell's mean accuracy is the
      maximum (false when no 4-objective cell exists).
    rule_store_follows_layout: comparing the smallest against the largest
      objective set, compact layouts (4 attributes or fewer) accumulate
      more distinct rules while wider ones accumulate fewer.
    """
    by_dataset: Dict[str, List[CellAggregate]] = {}
    for cell in report.cells:
        if not cell.probe:
            by_dataset.setdefault(cell.dataset, []).append(cell)

    verdicts = {}
    for name, cells in by_dataset.items():
        cells = sorted(cells, key=lambda c: c.n_objectives)
        sizes = [c.n_objectives for c in cells]
        if len(set(sizes)) < 2:
            if strict:
                raise InsufficientCoverageError(
                    f"dataset {name!r} covers {len(set(sizes))} objective-set "
                    "size(s); at least 2 are needed"
                )
            continue

        hks = [c.rules_hks[0] for c in cells]
        shrink = all(a > b for a, b in zip(hks, hks[1:]))

        four = next((c for c in cells if c.n_objectives == 4), None)
        peak = four is not None and all(
            four.accuracy[0] >= c.accuracy[0] for c in cells
        )

        rks_first = cells[0].rules_rks[0]
        rks_last = cells[-1].rules_rks[0]
        if cells[0].n_attributes <= 4:
            store = rks_last > rks_first
        else:
            store = rks_last < rks_first
        verdicts[name] = {
            "dominators_shrink": shrink,
            "accuracy_peak_at_four": peak,
            "rule_store_follows_layout": store,
        }
    if strict and not verdicts:
        raise InsufficientCoverageError("report has no non-probe cells")
    return verdicts


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


def render_experiment_table(report: ExperimentReport) -> str:
    """Plain-text aggregate table, one row per (dataset, objective set)."""
    headers = (
        "Data set", "Instances", "Attributes", "Objectives",
        "Rules (RKS)", "Dominators (HKS)", "Wall time (ms)", "Accuracy %",
    )
    table = [headers]
    for cell in report.cells:
        label = f"{cell.n_objectives}" + (" (probe)" if cell.probe else "")
        table.append((
            cell.dataset,
            str(cell.n_instances),
            str(cell.n_attributes),
            label,
            f"{cell.rules_rks[0]:.1f}",
            f"{cell.rules_hks[0]:.2f}",
            f"{cell.cpu_time_ms[0]:.1f}",
            f"{cell.accuracy[0] * 100:.2f}",
        ))
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_experiment_artifacts(
    report: ExperimentReport, out_dir: str, partial: bool = False
) -> dict:
    """Write report.json, report.txt and per-cell front CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    doc = report.to_dict()
    if partial:
        doc["partial"] = True
    json_path = os.path.join(out_dir, REPORT_JSON)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    paths[REPORT_JSON] = json_path

    txt_path = os.path.join(out_dir, REPORT_TXT)
    text = render_experiment_table(report)
    if partial:
        text = "PARTIAL REPORT (sweep aborted)\n\n" + text
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    paths[REPORT_TXT] = txt_path

    fronts_dir = os.path.join(out_dir, FRONTS_DIR)
    os.makedirs(fronts_dir, exist_ok=True)
    for (dataset, n, probe), dump in report.fronts.items():
        names = next(
            (c.metric_names for c in report.cells
             if c.dataset == dataset and c.n_objectives == n and c.probe == probe),
            tuple(f"m{i}" for i in range(n)),
        )
        stem = f"{dataset}_{n}obj" + ("_probe" if probe else "")
        front_path = os.path.join(fronts_dir, stem + ".csv")
        with open(front_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rule_id"] + list(names))
            for entry in dump:
                writer.writerow(
                    [entry["rule_id"]] + [repr(v) for v in entry["metrics"]]
                )
        paths[f"{FRONTS_DIR}/{stem}.csv"] = front_path
    return paths


def load_plan(path: str) -> ExperimentPlan:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError([("plan", f"cannot read plan file: {exc}")]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([("plan", f"plan file is not valid JSON: {exc}")]) from exc
    return ExperimentPlan.from_dict(raw)
