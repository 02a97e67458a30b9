"""Run every verification suite and write one JSON report per suite.

    python scripts/run_suites.py --out reports/ --seed 0
"""

import argparse
from pathlib import Path

from qdeform.suites import SUITES, SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in SUITES:
        rep = run_suite(name, SuiteConfig(seed=args.seed))
        bad = [r.id for r in rep.records if r.status != "exact-zero"]
        print(f"{'PASS' if rep.passed else 'FAIL'}  {name:22s} {rep.wall_time:6.2f}s  {'; '.join(bad)}")
        if args.out:
            (args.out / f"{name}.json").write_text(rep.to_json() + "\n")
        if not rep.passed:
            failed.append(name)
    print(f"{len(SUITES) - len(failed)}/{len(SUITES)} suites pass")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
