"""Rendering of rules and run artifacts.

Four fixed files land in the output directory: run.json (machine-readable
result, free of timing noise so equal seeds give equal bytes), rules.txt
(If-Then listing with objective vectors), front.csv (final dominators for
plotting) and report.txt (human summary, this one carries the wall times).
"""
from __future__ import annotations

import csv
import io
import json
import os
from typing import Optional

from .dataset import Dataset
from .evolution import RunResult
from .rules import Chromosome

RUN_JSON = "run.json"
RULES_TXT = "rules.txt"
FRONT_CSV = "front.csv"
REPORT_TXT = "report.txt"


def render_rule(rule: Chromosome, dataset: Dataset) -> str:
    """Decode a chromosome into "IF a=v AND ... THEN class=c" text."""
    if len(rule.genes) != dataset.n_attributes:
        raise ValueError(
            f"rule has {len(rule.genes)} genes, dataset has "
            f"{dataset.n_attributes} attributes"
        )
    parts = [
        f"{meta.name}={meta.display(code)}"
        for meta, code in zip(dataset.attributes, rule.genes)
    ]
    cls = dataset.class_attribute.display(rule.class_code)
    return "IF " + " AND ".join(parts) + f" THEN class={cls}"


def true_vector(result: RunResult, rule_id: int) -> tuple:
    """Metric values with the minimize-negation undone (and -0.0 cleaned)."""
    stored = result.beliefs.vector(rule_id)
    return tuple(
        (v if spec.maximize else -v) + 0.0
        for v, spec in zip(stored, result.config.metrics)
    )


def run_document(result: RunResult) -> dict:
    """JSON-ready view of a run. Deterministic for a fixed seed and config."""
    beliefs = result.beliefs
    front = list(result.final_front)
    doc = {
        "config": result.config.to_dict(),
        "dataset": result.dataset.name,
        "eval_mode": result.eval_mode,
        "n_train": result.n_train,
        "n_test": result.n_test,
        "stopped_early": result.stopped_early,
        "generations_run": len(result.generations),
        "rks_count": result.rks_count,
        "hks_count": result.hks_count,
        "accuracy": result.accuracy,
        "train_accuracy": result.train_accuracy,
        "metric_names": [spec.name for spec in result.config.metrics],
        "front": [
            {
                "rule_id": rid,
                "rule": str(beliefs.rule(rid)),
                "text": render_rule(beliefs.rule(rid), result.dataset),
                "metrics": list(true_vector(result, rid)),
            }
            for rid in front
        ],
        "history": [
            {
                "generation": rec.index,
                "front": list(rec.front),
                "new_rules": rec.new_rules,
                "rks_count": rec.rks_count,
                "offspring": rec.offspring,
            }
            for rec in result.generations
        ],
        "rules": [str(beliefs.rule(rid)) for rid in range(beliefs.rule_count)],
    }
    return doc


def render_run_json(result: RunResult) -> str:
    return json.dumps(run_document(result), indent=2) + "\n"


def render_rules_txt(result: RunResult) -> str:
    names = [spec.name for spec in result.config.metrics]
    lines = [
        f"# final dominator front ({len(result.final_front)} rules), "
        f"metrics: {', '.join(names)}"
    ]
    for rid in result.final_front:
        rule = result.beliefs.rule(rid)
        vec = ", ".join(format(v, ".6g") for v in true_vector(result, rid))
        lines.append(f"{render_rule(rule, result.dataset)}  [{vec}]")
    return "\n".join(lines) + "\n"


def render_front_csv(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rule_id"] + [spec.name for spec in result.config.metrics])
    for rid in result.final_front:
        writer.writerow([rid] + [repr(v) for v in true_vector(result, rid)])
    return buf.getvalue()


def render_report_txt(result: RunResult) -> str:
    cfg = result.config
    test_line = (
        f"holdout accuracy:  {result.accuracy:.4f} on {result.n_test} instances"
        if result.eval_mode == "holdout"
        else f"train accuracy:    {result.accuracy:.4f} (evaluated on training data)"
    )
    lines = [
        f"dataset:           {result.dataset.name}",
        f"objectives:        {', '.join(s.name + ('' if s.maximize else ' (min)') for s in cfg.metrics)}",
        f"population:        {cfg.population_size}",
        f"generations:       {len(result.generations)} of {cfg.generations}"
        + (" (stopped early)" if result.stopped_early else ""),
        f"seed:              {cfg.rng_seed}",
        f"train instances:   {result.n_train}",
        f"rules stored:      {result.rks_count}",
        f"distinct dominators seen: {result.hks_count}",
        f"final front size:  {len(result.final_front)}",
        test_line,
        f"resubstitution accuracy: {result.train_accuracy:.4f}",
        f"wall time:         {result.total_wall_ms:.1f} ms",
    ]
    return "\n".join(lines) + "\n"


def write_run_artifacts(result: RunResult, out_dir: str) -> dict:
    """Write the four fixed-name artifacts; returns name -> path."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = {
        RUN_JSON: render_run_json(result),
        RULES_TXT: render_rules_txt(result),
        FRONT_CSV: render_front_csv(result),
        REPORT_TXT: render_report_txt(result),
    }
    paths = {}
    for name, text in outputs.items():
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        paths[name] = path
    return paths
