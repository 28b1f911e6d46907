"""Run the randomized property sweeps at acceptance sizes.

    python3 scripts/run_sweeps.py                # qubits, 200 trials of every check
    python3 scripts/run_sweeps.py --qutrits 50   # also 50 qutrit trials of thm1, thm6
"""

import argparse
import os
import time

from msplit.scenarios import SWEEP_CHECKS, run_sweep


def sweep(dims, trials, seed, checks, out) -> bool:
    t0 = time.perf_counter()
    res = run_sweep(dims, trials, seed, checks, out)
    print(res.report.table())
    print(f"  ({time.perf_counter() - t0:.1f}s)")
    for f in res.failures:
        print(f"  reproducer: {f.get('path')}")
    return res.report.passed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--qutrits", type=int, default=0, help="qutrit trials for thm1 and thm6")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--reproducer-dir", default="reproducers")
    args = parser.parse_args()
    ok = sweep((2, 2, 2, 2), args.trials, args.seed, SWEEP_CHECKS, args.reproducer_dir)
    if args.qutrits:
        os.environ.setdefault("MSPLIT_MAX_DIM", "81")
        ok &= sweep((3, 3, 3, 3), args.qutrits, args.seed, ("thm1", "thm6"), args.reproducer_dir)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
