"""
rephom - Main Application Module

Command-line entry point. Parses flags into a ``JobSpec``, sets up logging
from the environment settings and hands the job to ``rephom.api.jobs.run``,
whose return value is the process exit status.

Commands:
- compute, invariants: representation homology and its invariant part
- ce-check: the cochain route, compared against the representation complex
- hodge: Hodge pieces of cyclic homology and loop-space degrees
- trace, drinfeld-check: trace images and the freeness check
- macdonald, series: constant-term identities and Euler series
- catalog, validate, acceptance: models, validation and the acceptance suite
"""

import argparse
import logging
from typing import List, Optional, Sequence

from rephom import __version__
from rephom.api.jobs import COMMANDS, job_from_dict, run
from rephom.core.errors import InputError
from rephom.services.reports import FORMATS
from rephom.utils.config import get_settings, setup_logging

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rephom", description="Exact representation homology engine.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--space", help="space string (sphere:3, cp:2, kzs:2,3, ...) or model file")
    parser.add_argument("--group", help="built-in Lie algebra (sl2, gl2, so4, sp4, torus(2), ...) or algebra file")
    parser.add_argument("--model", help="model file to validate")
    parser.add_argument("--max-degree", type=int)
    parser.add_argument("--weight-cutoff", type=int)
    parser.add_argument("--m", type=int, help="Hodge piece")
    parser.add_argument("--type", help="root system type such as A1, A2, B2, G2, A1xA1")
    parser.add_argument("--r", type=int)
    parser.add_argument("--nq", type=int)
    parser.add_argument("--nt", type=int)
    parser.add_argument("--word", help="symmetric word, letters joined by '.', e.g. v1.[v1,v1]")
    parser.add_argument("--poly-degree", type=int)
    parser.add_argument("--only", action="append", default=[], help="acceptance criterion (repeatable)")
    parser.add_argument("--output", help="report path; stdout when omitted")
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="overrides REPHOM_LOG_LEVEL")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv (Optional[Sequence[str]]): arguments without the program name; ``sys.argv`` when None

    Returns:
        int: exit status (0 success, 1 mathematical mismatch, 2 input error)
    """
    args = build_parser().parse_args(argv)
    try:
        setup_logging(args.log_level or get_settings().log_level)
        fields = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}
        fields["only"] = _only(args.only)
        job = job_from_dict(fields)
    except InputError as exc:
        logger.error("invalid request: %s", exc)
        print(f"error: {exc}")
        return 2
    return run(job)


def _only(values: List[str]) -> List[str]:
    return [part for value in values for part in value.split(",") if part]
