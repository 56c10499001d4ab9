"""Run the estimator comparison and write the CSV plus a small text table.

    python scripts/compare_estimators.py --out compare_estimators.csv [--config scripts/compare_estimators.cfg]
"""

import argparse
import logging
import sys

from funcbregman.simulation import ESTIMATORS, SimConfig, load_config, run_simulation, write_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="compare_estimators.csv")
    parser.add_argument("--config", help="key=value config; defaults to the built-in grid")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING)

    cfg = load_config(args.config) if args.config else SimConfig()
    records = run_simulation(cfg)
    write_csv(records, args.out)

    table = {}
    for r in records:
        table.setdefault(r.n, {})[r.estimator] = r.mean_sq_error
    names = [e for e in ESTIMATORS if e in cfg.estimators]
    print(f"{'n':>4} " + " ".join(f"{name:>20}" for name in names))
    for n in sorted(table):
        print(f"{n:>4} " + " ".join(f"{table[n][name]:>20.6g}" for name in names))
    print(f"wrote {len(records)} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
