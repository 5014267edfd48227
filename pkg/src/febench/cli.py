"""Config-driven command-line front end.

Subcommands: run, list, validate. Exit codes: 0 success, 2 validation
error, 3 numeric error, 4 I/O error. Environment variables prefixed
FEBENCH_ override --out and --seed for CI runs.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import NumericError, ValidationError
from .scenarios import REGISTRY, jsonable, list_scenarios, validate_params, write_json

TOP_LEVEL_KEYS = {"scenario", "params", "out_dir", "seed"}


def load_config(path):
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    for key in cfg:
        if key not in TOP_LEVEL_KEYS:
            raise ValidationError(f"unknown key {key}")
    if "scenario" not in cfg:
        raise ValidationError("missing required key scenario")
    return cfg


def run_scenario(cfg, out_dir=None, seed=None):
    name = cfg["scenario"]
    params = validate_params(name, cfg.get("params"))
    out = Path(out_dir or cfg.get("out_dir") or ".")
    out.mkdir(parents=True, exist_ok=True)
    seed = int(seed if seed is not None else cfg.get("seed", 0))
    rng = np.random.default_rng(seed)

    runner = REGISTRY[name][0]
    start = time.monotonic()
    summary, files = runner(params, out, rng)
    summary = jsonable(summary)
    wall = time.monotonic() - start

    canonical = json.dumps(
        {"scenario": name, "params": params, "seed": seed}, sort_keys=True
    )
    manifest = {
        "scenario": name,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": seed,
        "package": "febench 0.1.0",
        "wall_time_s": wall,
        "outputs": sorted(str(f) for f in files),
        "summary": summary,
    }
    write_json(out / "manifest.json", manifest)
    return manifest


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="febench",
        description="Floating-electron readout workbench: run registered "
        "scenarios against their documented quantitative targets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=os.environ.get("FEBENCH_OUT"))
    p_run.add_argument("--seed", type=int,
                       default=_env_int("FEBENCH_SEED"))

    p_list = sub.add_parser("list", help="list registered scenarios")
    p_list.add_argument("filter", nargs="?", default=None)

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("--config", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            rows = list_scenarios(args.filter)
            for name, target in rows:
                print(f"{name:24s} {target}")
            if not rows:
                print("(no matching scenarios)")
            return 0
        if args.command == "validate":
            cfg = load_config(args.config)
            validate_params(cfg["scenario"], cfg.get("params"))
            print(f"config ok: scenario {cfg['scenario']}")
            return 0
        cfg = load_config(args.config)
        manifest = run_scenario(cfg, out_dir=args.out, seed=args.seed)
        print(json.dumps(manifest["summary"], indent=2, sort_keys=True))
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def _env_int(name):
    val = os.environ.get(name)
    return int(val) if val else None


if __name__ == "__main__":
    sys.exit(main())
