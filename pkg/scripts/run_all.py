#!/usr/bin/env python3
"""Run every experiment with its default grid and write one report per verb.

    python3 scripts/run_all.py --out-dir results --seed 0
"""
import argparse
import sys
import time
from pathlib import Path

from pisierlab.cli import main as cli_main
from pisierlab.config import EXPERIMENTS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--skip", nargs="*", default=[], choices=EXPERIMENTS,
                    help="verbs to leave out (constants is the slow one)")
    args = ap.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for verb in EXPERIMENTS:
        if verb in args.skip:
            continue
        path = out_dir / f"{verb}.{args.format}"
        start = time.perf_counter()
        code = cli_main([verb, "--seed", str(args.seed), "--format", args.format, "--out", str(path)])
        print(f"  -> {path} ({time.perf_counter() - start:.1f}s, exit {code})", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
