"""Command-line entry points.

Exit codes: 0 when every check passes, 1 when some check fails,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, PolystabError


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--param needs key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polystab",
        description="numerical laboratory for polynomial semigroup stability",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", help="path to the config file")
    run_p.add_argument("--out", default=None)

    sub.add_parser("zoo", help="list generator families")

    rates_p = sub.add_parser("rates", help="evaluate the decay-rate table")
    rates_p.add_argument("--beta", type=float, required=True)
    rates_p.add_argument("--p", type=float, required=True)
    rates_p.add_argument("--rho", type=float, required=True)
    _add_common(rates_p)

    sweep_p = sub.add_parser("sweep", help="resolvent sweep and envelope fit")
    sweep_p.add_argument("--family", required=True)
    sweep_p.add_argument("--param", action="append", metavar="k=v")
    sweep_p.add_argument("--dim", type=int, default=None)
    _add_common(sweep_p)

    decay_p = sub.add_parser("decay", help="decay verification on a ladder")
    decay_p.add_argument("--family", required=True)
    decay_p.add_argument("--param", action="append", metavar="k=v")
    decay_p.add_argument("--dims", required=True, help="comma-separated")
    decay_p.add_argument("--rho", type=float, default=0.0)
    decay_p.add_argument("--p", type=float, default=2.0)
    decay_p.add_argument("--norm", choices=["interp", "fractional"],
                         default="interp")
    _add_common(decay_p)

    sharp_p = sub.add_parser("sharpness", help="sharpness probe on a ladder")
    sharp_p.add_argument("--family", default="jordan_growth")
    sharp_p.add_argument("--param", action="append", metavar="k=v")
    sharp_p.add_argument("--dims", required=True, help="comma-separated")
    sharp_p.add_argument("--fractions", default="0.5,1.0")
    _add_common(sharp_p)

    return parser


def _config_from_args(args) -> dict:
    base = {"seed": getattr(args, "seed", 0)}
    if getattr(args, "no_plots", False):
        base["plots"] = False
    if args.command == "rates":
        base.update(kind="rates", beta=args.beta, p=args.p, rho=args.rho)
    elif args.command == "sweep":
        model = {"family": args.family, "params": _parse_params(args.param)}
        if args.dim:
            model["dim"] = args.dim
        base.update(kind="sweep", model=model)
    elif args.command == "decay":
        base.update(
            kind="decay",
            model={
                "family": args.family,
                "params": _parse_params(args.param),
                "dims": [int(d) for d in args.dims.split(",")],
            },
            rho=args.rho,
            p=args.p,
            norm_kind=args.norm,
        )
    elif args.command == "sharpness":
        base.update(
            kind="sharpness",
            model={
                "family": args.family,
                "params": _parse_params(args.param),
                "dims": [int(d) for d in args.dims.split(",")],
            },
            sigma_fractions=[float(f) for f in args.fractions.split(",")],
        )
    return base


def main(argv=None) -> int:
    from . import harness

    args = build_parser().parse_args(argv)
    try:
        if args.command == "zoo":
            sys.stdout.write(harness.list_zoo())
            return 0
        if args.command == "run":
            report = harness.run(args.config, out_dir=args.out)
        else:
            report = harness.run(_config_from_args(args), out_dir=args.out)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except PolystabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    sys.stdout.write(report.to_json())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
