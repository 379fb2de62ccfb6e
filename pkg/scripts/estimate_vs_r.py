#!/usr/bin/env python3
"""Pisier-constant estimates for l_r^d across a grid of r at fixed small n.

The output is a plain CSV (r, n, estimate, harmonic bound, interpolation bound
where it applies) meant for plotting the measured dependence on r. The numbers
are lower bounds from the optimizer; nothing here claims an asymptotic rate.

    python3 scripts/estimate_vs_r.py --n 3 --d 2 --r 1 1.25 1.5 2 3 4 8 inf
"""
import argparse
import csv
import math
import sys

from pisierlab.constants import (
    OptimizerConfig,
    estimate_pisier_constant,
    harmonic_bound,
    interpolation_bound,
    lr_interpolation_theta,
)
from pisierlab.spaces import format_exponent, lr, parse_exponent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--p", default="2")
    ap.add_argument("--r", nargs="+", default=["1", "1.5", "2", "3", "4", "8", "inf"])
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    p = parse_exponent(args.p)
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["r", "n", "p", "estimate", "harmonic_bound", "interpolation_bound"])
    for r in sorted(parse_exponent(x) for x in args.r):
        est = estimate_pisier_constant(args.n, p, lr(r, args.d), cfg)
        interp = ""
        if p == 2.0 and 2 < r < math.inf:
            interp = repr(interpolation_bound(p, lr_interpolation_theta(r)))
        w.writerow([format_exponent(r), args.n, format_exponent(p), repr(est.value),
                    repr(harmonic_bound(args.n)), interp])
        fh.flush()
    if fh is not sys.stdout:
        fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
