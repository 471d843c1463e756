"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import os
import sys
from pathlib import Path

from .exceptions import AccuracyError, FracsimError, ValidationError
from .experiment import parse_config, run_study
from .mlf import MlfRequest, mlf

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fracsim",
        description="Simulation and convergence studies for linear stochastic "
        "fractional-order evolution equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_mlf = sub.add_parser(
        "mlf", help="evaluate the Mittag-Leffler function E_{rho,mu}(z)"
    )
    p_mlf.add_argument("--rho", type=float, required=True)
    p_mlf.add_argument("--mu", type=float, default=1.0)
    p_mlf.add_argument("--z", type=float, required=True)
    p_mlf.add_argument("--tol", type=float, default=1e-12)

    for name, method in (("spectral-study", "spectral"), ("fem-study", "fem")):
        p = sub.add_parser(name, help=f"run the {method} convergence study")
        p.set_defaults(method=method)
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file (defaults to the desk preset)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", type=str, default=None,
                       help="directory for the CSV/JSON outputs")
    return parser


def _run_mlf(args):
    req = MlfRequest(rho=args.rho, mu=args.mu, z=args.z, tol=args.tol)
    print(repr(mlf(req)))
    return EXIT_OK


def _load_config(args):
    if args.config is not None:
        text = Path(args.config).read_text()
    else:
        text = '{"method": "%s"}' % args.method
    config = parse_config(text)
    if config.method != args.method:
        raise ValidationError(
            f"config method {config.method!r} does not match the "
            f"{args.method}-study subcommand"
        )
    overrides = {}
    env_seed = os.environ.get("FRACSIM_SEED")
    if env_seed is not None:
        try:
            overrides["seed"] = int(env_seed)
        except ValueError:
            raise ValidationError(f"FRACSIM_SEED must be an integer, got {env_seed!r}")
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_path"] = str(
            Path(args.out) / Path(config.output_path).name
        )
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    return config


def _run_study(args):
    config = _load_config(args)
    study = run_study(config, threads=args.threads)
    print(f"wrote {config.output_path}")
    for gamma, emp, theo in zip(
        study.gammas, study.empirical_rates, study.theoretical_rates
    ):
        print(f"gamma={gamma:g}: empirical rate {emp:.4f}, theoretical {theo:.4f}")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "mlf":
            return _run_mlf(args)
        return _run_study(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, FracsimError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
