"""Command-line entry point.

Subcommands: run (one mining run), experiment (plan sweep), inspect
(dataset summary), serve (HTTP service + browser UI). Exit codes: 0 on
success, 1 for configuration problems, 2 for runtime failures; error
text goes to standard error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import dataset as ds
from .evolution import ConfigError, RunConfig, run
from .experiment import (
    ExperimentPlan,
    render_experiment_table,
    run_plan,
    write_experiment_artifacts,
)
from .render import write_run_artifacts

DEFAULT_OUT = "carm-out"
BUNDLED_PLANS = ("benchmark",)


def default_out_dir() -> str:
    return os.environ.get("CARM_OUT") or DEFAULT_OUT


def _parse_value(text: str):
    """JSON value when it parses, bare string otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, pairs) -> dict:
    """Apply KEY=VALUE pairs, last wins. Dotted keys reach nested objects."""
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError([("--set", f"expected KEY=VALUE, got {pair!r}")])
        target = raw
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = target.get(part)
            if nxt is None:
                nxt = target[part] = {}
            elif not isinstance(nxt, dict):
                raise ConfigError([(key, f"{part} is not an object")])
            target = nxt
        target[parts[-1]] = _parse_value(value)
    return raw


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError([(what, f"cannot read {path}: {exc}")]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([(what, f"{path} is not valid JSON: {exc}")]) from exc


def build_run_config(args) -> RunConfig:
    raw = _load_json(args.config, "config") if args.config else {}
    if not isinstance(raw, dict):
        raise ConfigError([("config", "configuration must be a JSON object")])
    if args.preset:
        raw["dataset"] = args.preset
    if args.objectives:
        raw["metrics"] = [m.strip() for m in args.objectives.split(",") if m.strip()]
    if args.seed is not None:
        raw["rng_seed"] = args.seed
    apply_overrides(raw, args.set)
    return RunConfig.from_dict(raw)


def cmd_run(args) -> int:
    config = build_run_config(args)
    result = run(config)
    out_dir = args.out or default_out_dir()
    paths = write_run_artifacts(result, out_dir)
    print(f"dataset={result.dataset.name} generations={len(result.generations)} "
          f"rules={result.rks_count} front={len(result.final_front)} "
          f"accuracy={result.accuracy:.4f}")
    print(f"artifacts written to {out_dir}: {', '.join(sorted(paths))}")
    return 0


def load_plan_dict(spec_arg: str) -> dict:
    """Raw plan JSON from a file path or a bundled plan name."""
    if os.path.exists(spec_arg):
        return _load_json(spec_arg, "plan")
    if spec_arg in BUNDLED_PLANS:
        from importlib import resources

        ref = resources.files("carm").joinpath(f"plans/{spec_arg}.json")
        return json.loads(ref.read_text(encoding="utf-8"))
    raise ConfigError([
        ("plan", f"{spec_arg!r} is neither a plan file nor a bundled plan "
                 f"(bundled: {', '.join(BUNDLED_PLANS)})")
    ])


def cmd_experiment(args) -> int:
    raw = load_plan_dict(args.plan)
    apply_overrides(raw, args.set)
    plan = ExperimentPlan.from_dict(raw)
    out_dir = args.out or default_out_dir()

    done = []

    def progress(row):
        done.append(row)
        print(f"  [{len(done)}] {row.dataset} {row.n_objectives}obj "
              f"rep={row.repetition} rules={row.rules_rks} "
              f"dominators={row.rules_hks} acc={row.accuracy:.3f}",
              file=sys.stderr)

    report = run_plan(plan, out_dir=out_dir, on_progress=progress)
    paths = write_experiment_artifacts(report, out_dir)
    print(render_experiment_table(report), end="")
    print(f"artifacts written to {out_dir}: {', '.join(sorted(paths))}")
    return 0


def cmd_inspect(args) -> int:
    data = ds.resolve_dataset(args.dataset)
    counts = data.class_counts()
    print(f"dataset: {data.name}")
    print(f"instances: {len(data.instances)}")
    print(f"attributes ({data.n_attributes}):")
    for meta in data.attributes:
        spellings = ", ".join(f"{c}={meta.display(c)}" for c in meta.values)
        print(f"  {meta.name} [{meta.kind}]: {spellings}")
    cmeta = data.class_attribute
    print(f"class attribute {cmeta.name}:")
    for code in cmeta.values:
        print(f"  {code}={cmeta.display(code)}: {counts.get(code, 0)} instances")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, out_dir=args.out or default_out_dir())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carm",
        description="Interactive multi-objective classification rule miner.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="execute one mining run")
    p_run.add_argument("--config", help="RunConfig JSON file")
    p_run.add_argument("--preset", help="built-in dataset name (iris, ljb, wbc)")
    p_run.add_argument("--objectives",
                       help="comma list of metrics, e.g. coverage,confidence")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config key (repeatable, last wins)")
    p_run.add_argument("--seed", type=int, help="random seed")
    p_run.add_argument("--out", help="output directory (default $CARM_OUT)")
    p_run.set_defaults(func=cmd_run)

    p_exp = sub.add_parser("experiment", help="run a replication plan")
    p_exp.add_argument("--plan", default="benchmark",
                       help="plan JSON file or bundled plan name")
    p_exp.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one plan key (repeatable, last wins)")
    p_exp.add_argument("--out", help="output directory (default $CARM_OUT)")
    p_exp.set_defaults(func=cmd_experiment)

    p_ins = sub.add_parser("inspect", help="describe a dataset")
    p_ins.add_argument("dataset", help="preset name or CSV path")
    p_ins.set_defaults(func=cmd_inspect)

    p_srv = sub.add_parser("serve", help="start the HTTP service and UI")
    p_srv.add_argument("--port", type=int, default=8077)
    p_srv.add_argument("--out", help="directory for persisted runs")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def _fail_config(exc: ConfigError) -> int:
    for field_name, message in exc.errors:
        print(f"error: {field_name}: {message}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail_config(exc)
    except ds.DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
