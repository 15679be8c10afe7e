"""Command-line interface: composable pipeline stages over one config file.

Exit codes: 0 success, 2 validation error (bad config, missing upstream
artifact), 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import default_config, load_config, validate_config
from .errors import ConfigError, GridSenseError, StageError
from .pipeline import STAGES, run_stage

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsense",
        description="Multi-scale PMU failure-prediction pipeline",
    )
    parser.add_argument("--config", help="pipeline config JSON", default=None)
    parser.add_argument("--workdir", default=None,
                        help="artifact directory (default $GRIDSENSE_WORKDIR or '.')")
    parser.add_argument("--seed", type=int, default=None, help="override eval seed")
    parser.add_argument("--paper-compat", action="store_true",
                        help="global scaling + SMOTE before folding")
    parser.add_argument("--threads", type=int, default=1)

    sub = parser.add_subparsers(dest="stage", required=True)
    for stage in STAGES:
        p = sub.add_parser(stage)
        if stage == "synth":
            p.add_argument("--out", default=None, help="alias for --workdir")
        if stage == "extract":
            p.add_argument("--schema", default=None,
                           help="dump the active feature schema as JSON and exit")
        if stage == "evaluate":
            p.add_argument("--holdout", type=float, default=None,
                           help="use a single stratified holdout split (e.g. 0.1)")
    sub.add_parser("validate-config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workdir = args.workdir or getattr(args, "out", None) \
        or os.environ.get("GRIDSENSE_WORKDIR", ".")

    if args.stage == "validate-config":
        if args.config is None:
            print("ok (defaults)")
            return EXIT_OK
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError:
            print("violation at /: syntax")
            return EXIT_VALIDATION
        violations = validate_config(cfg)
        if violations:
            for v in violations:
                print(f"violation at {v.path}: {v.message}")
            return EXIT_VALIDATION
        print("ok")
        return EXIT_OK

    overrides = {}
    if args.seed is not None:
        overrides = {"eval": {"seed": args.seed}, "scenario": {"seed": args.seed}}
    if args.paper_compat:
        overrides.setdefault("compat", {})["paper_compat"] = True

    try:
        config = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.stage == "extract" and getattr(args, "schema", None):
        from .pipeline import _schema

        with open(args.schema, "w") as fh:
            json.dump(_schema(config).to_json(), fh, indent=2, sort_keys=True)
        print(f"schema written to {args.schema}")
        return EXIT_OK

    try:
        summary = run_stage(
            args.stage, config, workdir,
            threads=args.threads,
            holdout=getattr(args, "holdout", None),
        )
    except StageError as exc:
        print(f"stage error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GridSenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    print(json.dumps({"stage": args.stage, **summary}, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
