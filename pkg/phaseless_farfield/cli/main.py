"""
Command line: phaseless-farfield {forward,phaseless,recover,invert,run,validate}

Exit status 0 on success, 2 for usage or config errors, 3 for pipeline or
data errors, 4 for numerical failures.
"""
import argparse
import logging
import sys
from typing import List, Optional

from ..utilities.exceptions import PhaselessFarFieldException
from ..utilities.general_utilities import init_logger
from .config import load_config
from .pipeline import Pipeline
from .validate import SUITES, run_suite, summary

logger = logging.getLogger(__name__)

STAGE_VERBS = ("forward", "phaseless", "recover", "invert")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseless-farfield",
        description="Phaseless far-field scattering workbench",
    )
    subparsers = parser.add_subparsers(dest="verb", required=True)
    for verb in STAGE_VERBS + ("run",):
        help_text = "run every configured stage" if verb == "run" else f"run the {verb} stage"
        sub = subparsers.add_parser(verb, help=help_text)
        sub.add_argument("--config", required=True, help="experiment config (JSON)")
        sub.add_argument("--out", help="output directory, overrides the config")
        sub.add_argument("--seed", type=int, help="noise seed, overrides the config")
        sub.add_argument("--threads", type=int, default=1, help="worker threads")
        sub.add_argument("--verbose", action="store_true", help="debug logging")
    validate = subparsers.add_parser("validate", help="run a validation suite")
    validate.add_argument("--suite", choices=SUITES, default="fast")
    validate.add_argument("--out", default=".", help="directory of validate_report.json")
    validate.add_argument("--threads", type=int, default=1, help="worker threads")
    validate.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


def cmd_stage(args) -> int:
    config = load_config(args.config, {"output": args.out, "seed": args.seed})
    pipeline = Pipeline(config, threads=args.threads)
    stages = config.ordered_stages() if args.verb == "run" else [args.verb]
    for stage, result in pipeline.run(stages).items():
        print(f"{stage}: {result}")
    return 0


def cmd_validate(args) -> int:
    results = run_suite(args.suite, args.out, args.threads)
    print(summary(results))
    return 0 if all(result.passed for result in results) else 3


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    init_logger(logging.DEBUG if args.verbose else logging.INFO)
    try:
        if args.verb == "validate":
            return cmd_validate(args)
        return cmd_stage(args)
    except PhaselessFarFieldException as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyError as e:
        logger.error(f"Unknown name: {e}")
        return 2
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return 3


def run():
    sys.exit(main())
