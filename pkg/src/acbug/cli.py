"""Command line front end: model generation, experiment sweeps, instance
bounds, and built-in property checks.

Exit codes: 0 success, 2 configuration problem (bad flags, missing or invalid
config), 1 runtime failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import checks
from .elimination import ModlParams, theoretical_complexity
from .generate import GenConfig, gen_scm
from .harness import experiment_config_from_dict, run_to_directory
from .scm import load as load_scm, to_json


class ConfigError(Exception):
    pass


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(p, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {path}: {e}") from e


def _cmd_gen(args) -> int:
    doc = _load_json(args.config)
    if not isinstance(doc, dict):
        raise ConfigError("gen config must be a JSON object")
    known = {f.name for f in dataclasses.fields(GenConfig)}
    bad = set(doc) - known
    if bad:
        raise ConfigError(f"unknown gen fields: {sorted(bad)}")
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        cfg = GenConfig(**doc)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    scm = gen_scm(cfg)
    text = to_json(scm) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_run(args) -> int:
    doc = _load_json(args.config)
    if args.seed is not None:
        doc["master_seed"] = args.seed
    try:
        cfg = experiment_config_from_dict(doc)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    result = run_to_directory(
        cfg, args.out, jobs=args.jobs, dump_phases=args.dump_phases
    )
    print(f"wrote {len(result.records)} records to {args.out}/records.csv")
    if result.skipped:
        print(f"skipped {result.skipped} runs (arm cap)")
    return 0


def _cmd_bound(args) -> int:
    doc = _load_json(args.config)
    if "scm" in doc:
        scm_path = Path(doc["scm"])
        if not scm_path.is_file():
            raise ConfigError(f"model document not found: {doc['scm']}")
        scm = load_scm(scm_path)
    elif "gen" in doc:
        try:
            scm = gen_scm(GenConfig(**doc["gen"]))
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from e
    else:
        raise ConfigError("bound config needs 'scm' (path) or 'gen' (inline)")
    for field in ("epsilon", "delta"):
        if field not in doc:
            raise ConfigError(f"bound config needs '{field}'")
    try:
        params = ModlParams(
            epsilon=float(doc["epsilon"]),
            delta=float(doc["delta"]),
            sigma2=float(doc.get("sigma2", scm.outcome.noise_sigma2)),
            reward_bound=float(doc.get("reward_bound", scm.outcome.reward_bound)),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    print("H_eps %.9g" % theoretical_complexity(scm, params))
    if doc.get("parents_bound") is not None:
        with_bound = ModlParams(
            epsilon=params.epsilon,
            delta=params.delta,
            sigma2=params.sigma2,
            reward_bound=params.reward_bound,
            parents_bound=int(doc["parents_bound"]),
        )
        print("H_eps_known_parents %.9g" % theoretical_complexity(scm, with_bound))
    return 0


def _cmd_validate(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    for name, fn in checks.ALL_CHECKS:
        try:
            problem = fn(rng)
        except Exception as e:  # a check crashing is a failure, not an abort
            problem = f"raised {type(e).__name__}: {e}"
        if problem:
            failures += 1
            print(f"FAIL {name}: {problem}")
        else:
            print(f"ok   {name}")
    if failures:
        print(f"{failures} of {len(checks.ALL_CHECKS)} checks failed")
        return 1
    print(f"all {len(checks.ALL_CHECKS)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acbug",
        description="Causal-bandit simulation workbench: generate models, "
        "run algorithm sweeps, compute instance bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a model document from a JSON config")
    p.add_argument("--config", required=True, help="GenConfig JSON path")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("run", help="execute an experiment sweep")
    p.add_argument("--config", required=True, help="experiment JSON path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument(
        "--dump-phases",
        action="store_true",
        help="write per-run phase logs as JSON",
    )

    p = sub.add_parser("bound", help="print instance-dependent sample bounds")
    p.add_argument("--config", required=True, help="bound JSON path")

    p = sub.add_parser("validate", help="run the built-in property checks")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "bound": _cmd_bound,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
