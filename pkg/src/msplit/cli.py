"""``msplit`` command line: built-in examples, scenario files and property sweeps.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import MsplitError, ScenarioError
from .scenarios import (
    SWEEP_CHECKS,
    fmt,
    load_scenario,
    replay_reproducer,
    run_counterexample,
    run_scenario,
    run_sweep,
)


def _emit(reports, fmt_name: str) -> None:
    if fmt_name == "json":
        blob = [r.to_dict() for r in reports]
        print(json.dumps(blob[0] if len(blob) == 1 else blob, indent=1))
    else:
        print("\n".join(r.table() for r in reports))


def _summary_table(reports) -> str:
    head = f"{'scenario':<14} {'dl_entropy':>16} {'intermediate':>16} {'rel_entropy_14':>16} {'s_min':>16}  status"
    rows = [head, "-" * len(head)]
    for r in reports:
        v = r.values

        def col(key):
            return fmt(v[key]) if key in v else "-"

        rows.append(
            f"{r.name:<14} {col('dl_entropy'):>16} {col('intermediate_entropy'):>16} "
            f"{col('relative_entropy_14'):>16} {col('s_min'):>16}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(rows)


def _parse_dims(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ScenarioError(f"bad --dims {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ce = sub.add_parser("counterexample", help="run the three built-in four-qubit scenarios")
    ce.add_argument("--format", choices=("table", "json"), default="table")
    ce.add_argument("--seed", type=int, default=0)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    run.add_argument("--format", choices=("table", "json"), default="table")

    sw = sub.add_parser("sweep", help="seeded randomized property sweep")
    sw.add_argument("--dims", default="2,2,2,2")
    sw.add_argument("--trials", type=int, default=20)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--checks", default="thm1,thm6")
    sw.add_argument("--reproducer-dir", default="reproducers")
    sw.add_argument("--replay", metavar="FILE", help="re-run one reproducer file instead of a sweep")
    sw.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.command == "counterexample":
            reports = run_counterexample(seed=args.seed)
            if args.format == "table":
                print(_summary_table(reports))
                print()
            _emit(reports, args.format)
            return 0 if all(r.passed for r in reports) else 1
        if args.command == "run":
            rep = run_scenario(load_scenario(args.scenario))
            _emit([rep], args.format)
            return 0 if rep.passed else 1
        if args.command == "sweep":
            if args.replay:
                results = replay_reproducer(args.replay)
                for c in results:
                    mark = "PASS" if c.passed else "FAIL"
                    print(f"[{mark}] {c.name}: {fmt(c.lhs)} {c.relation} {fmt(c.rhs)} (tol {c.tol:g})")
                return 0 if all(c.passed for c in results) else 1
            checks = [c for c in args.checks.split(",") if c]
            unknown = [c for c in checks if c not in SWEEP_CHECKS]
            if unknown:
                raise ScenarioError(f"unknown checks {unknown}; choose from {','.join(SWEEP_CHECKS)}")
            res = run_sweep(_parse_dims(args.dims), args.trials, args.seed, checks, args.reproducer_dir)
            _emit([res.report], args.format)
            for f in res.failures:
                print(f"reproducer: {f.get('path', '(not written)')}", file=sys.stderr)
            return 0 if res.report.passed else 1
    except ScenarioError as exc:
        print(f"msplit: input error: {exc}", file=sys.stderr)
        return 2
    except MsplitError as exc:
        print(f"msplit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
