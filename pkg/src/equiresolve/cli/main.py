"""``equiresolve`` entry point.

Exit codes: 0 on success, 1 when a task produced an engine diagnostic and
2 when the problem file could not be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .dsl import DSLError, parse_problem
from .report import FORMATS, Flags, emit, run_task


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="equiresolve", description="Run the tasks of a problem file and print a report.")
    ap.add_argument("problem", help="problem file, or - for standard input")
    ap.add_argument("--out", choices=FORMATS, default="text", help="report format (default: text)")
    ap.add_argument("--max-steps", type=int, default=64, metavar="N", help="step budget per run (default: 64)")
    ap.add_argument("--trace", action="store_true", help="include a per-step invariant dump")
    ap.add_argument("--seed", type=int, default=0, help="offset of the sampling grid for smooth points")
    ap.add_argument("--verbose", "-v", action="store_true", help="log engine progress to standard error")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        if args.problem == "-":
            text = sys.stdin.read()
        else:
            with open(args.problem, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"equiresolve: cannot read {args.problem}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        problem = parse_problem(text)
    except DSLError as exc:
        print(f"{args.problem}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
        if args.out == "json":
            sys.stdout.write(json.dumps({"error": exc.to_json()}, sort_keys=True, indent=2) + "\n")
        return 2
    if args.max_steps < 1:
        print("equiresolve: --max-steps must be positive", file=sys.stderr)
        return 2
    doc = run_task(problem, Flags(args.max_steps, args.trace, args.seed))
    sys.stdout.buffer.write(emit(doc, args.out))
    sys.stdout.flush()
    return doc.exit_code
