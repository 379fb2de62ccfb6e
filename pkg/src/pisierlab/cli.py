"""Command-line entry point.

Exit codes: 0 when every row passes, 1 when some row fails, 2 for usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, parse_overrides, read_config_file
from .experiments import run_experiment
from .report import emit_report

VERB_HELP = {
    "verify": "run the exact-identity suite",
    "constants": "estimate Pisier and Q constants over an (n, p, space) grid",
    "bounds": "tabulate the closed-form bounds (harmonic, interpolation, V_t formula)",
    "lowerbound": "the sqrt(n) lower-bound experiment in L_1 of the cube",
    "sweep-gt": "check the G_t norm bound on random inputs",
    "sweep-vt": "check the exact V_t norm and its L_q bounds",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pisierlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for verb in EXPERIMENTS:
        sp = sub.add_parser(verb, help=VERB_HELP[verb])
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--n", help="dimensions, e.g. 1-5 or 2,4,6")
        sp.add_argument("--p", help="exponents, e.g. 1,2,inf")
        sp.add_argument("--spaces", help="space descriptors separated by ';'")
        sp.add_argument("--t", help="t grid: csv or start:stop:step")
        sp.add_argument("--theta", help="theta grid for the interpolation bound")
        sp.add_argument("--samples", type=int)
        sp.add_argument("--restarts", type=int)
        sp.add_argument("--max-iter", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--timing", action="store_true", help="record wall-clock runtimes (breaks byte-determinism)")
        sp.add_argument("--quiet", action="store_true", help="suppress the summary line on stderr")
    return parser


def make_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.defaults(args.experiment)
    if args.config:
        pairs = read_config_file(args.config)
        pairs.pop("experiment", None)
        cfg = replace(cfg, **parse_overrides(pairs))
    raw = {}
    for key in ("n", "p", "spaces", "t", "theta"):
        if getattr(args, key) is not None:
            raw[key] = getattr(args, key)
    cfg = replace(cfg, **parse_overrides(raw))
    direct = {k: getattr(args, k) for k in ("format", "out", "seed", "samples", "restarts", "max_iter", "workers")
              if getattr(args, k) is not None}
    if args.timing:
        direct["timing"] = True
    return replace(cfg, **direct).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        report = run_experiment(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"pisierlab: config error: {exc}", file=sys.stderr)
        return 2
    try:
        emit_report(report, cfg.format, cfg.out)
    except OSError as exc:
        print(f"pisierlab: {exc}", file=sys.stderr)
        return 2
    failed = report.failures()
    if not args.quiet:
        print(f"{cfg.experiment}: {len(report.rows) - len(failed)}/{len(report.rows)} rows passed",
              file=sys.stderr)
        for row in failed:
            print(f"  FAIL {row.experiment} n={row.n} p={row.p} space={row.space} "
                  f"value={row.value!r} bound={row.bound!r} seed={row.seed}", file=sys.stderr)
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
