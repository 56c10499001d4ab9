"""Command-line entry point: ``funcbregman {divergence,verify,estimate,simulate}``.

Exit codes: 0 success, 1 a verification suite failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import uniform_case as uc
from .bregman import divergence
from .errors import BregmanError
from .functionals import SHIPPED
from .measure import GridFunction, make_interval_grid
from .simulation import load_config, run_simulation, write_csv
from .verify import SUITES

ESTIMATOR_CHOICES = ("mle", "bayes_param", "restricted", "unrestricted", "projected")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def read_function_file(path, space) -> GridFunction:
    """Read ``x,value`` lines and match them against the grid nodes."""
    xs, vals = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'x,value', got {raw!r}")
        try:
            xs.append(float(parts[0]))
            vals.append(float(parts[1]))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number in {raw!r}") from None
    xs = np.asarray(xs)
    if np.any(np.diff(xs) <= 0):
        raise UsageError(f"{path}: x values must be strictly increasing")
    if xs.shape != space.nodes.shape or not np.allclose(xs, space.nodes, rtol=0, atol=1e-9):
        raise UsageError(f"{path}: x values do not match the {len(space)} grid nodes")
    return GridFunction(space, vals)


def read_samples(path) -> uc.Sample:
    text = Path(path).read_text()
    values = [float(tok) for line in text.splitlines()
              for tok in line.split("#", 1)[0].replace(",", " ").split()]
    return uc.Sample(values)


def _parse_grid(text):
    try:
        a, b, cells = text.split(",")
        return make_interval_grid(float(a), float(b), int(cells))
    except ValueError as exc:
        raise UsageError(f"--grid expects a,b,cells: {exc}") from None


def cmd_divergence(args):
    space = _parse_grid(args.grid)
    f = read_function_file(args.f, space)
    g = read_function_file(args.g, space)
    report = divergence(SHIPPED[args.phi](), f, g)
    print(json.dumps({"phi": args.phi, **report.as_dict()}))
    return 0


def cmd_verify(args):
    checks = SUITES[args.suite]()
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_estimate(args):
    s = read_samples(args.samples)
    out = {"estimator": args.estimator, "n": s.n, "x_max": s.x_max}
    if args.estimator == "mle":
        out["scale"] = uc.mle(s).scale
    elif args.estimator == "bayes_param":
        out.update(t1=args.t1, t2=args.t2,
                   scale=uc.bayes_parameter(s, uc.GammaPrior(args.t1, args.t2)))
    elif args.estimator == "restricted":
        out.update(metric=args.metric, scale=uc.bayes_uniform_restricted(s, args.metric).scale)
    elif args.estimator == "projected":
        out["scale"] = uc.project_to_uniform(uc.bayes_unrestricted(s)).scale
    else:
        d = uc.bayes_unrestricted(s)
        out["density"] = "n*x_max**n / ((n+1) * max(x, x_max)**(n+1))"
        out["value_below_x_max"] = float(d.pdf(0.0))
    print(json.dumps(out))
    return 0


def cmd_simulate(args):
    cfg = load_config(args.config)
    records = run_simulation(cfg)
    write_csv(records, args.out)
    failed = sum(r.failed for r in records if not r.estimator.startswith("bayes_param["))
    if failed:
        print(f"warning: {failed} estimator runs failed and were excluded", file=sys.stderr)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="funcbregman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("divergence", help="functional Bregman divergence of two grid functions")
    p.add_argument("--phi", choices=sorted(SHIPPED), required=True)
    p.add_argument("--f", required=True, help="file of x,value lines")
    p.add_argument("--g", required=True, help="file of x,value lines")
    p.add_argument("--grid", required=True, help="a,b,cells midpoint grid")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="estimate a scaled uniform from samples")
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES, required=True)
    p.add_argument("--samples", required=True, help="file of positive numbers")
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=1.0)
    p.add_argument("--metric", choices=[m.value for m in uc.Metric], default="fisher")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="Monte Carlo estimator comparison to CSV")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)
    return parser


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (BregmanError, OSError, ValueError) as exc:
        print(f"funcbregman: error: {exc}", file=sys.stderr)
        return 2


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
