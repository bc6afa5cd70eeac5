"""Command-line entry point: ``moljunction {params,sample,iv,map,verify}``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io, pipeline
from .errors import InputError, NumericalContractError
from .verify import run_verification

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

log = logging.getLogger("moljunction")


def _add_run_flags(sub):
    sub.add_argument("config", type=Path, help="JSON run configuration")
    sub.add_argument("--seed", type=int, help="override sampler.seed")
    sub.add_argument("--samples", type=int, help="override sampler.sample_count")
    sub.add_argument("--bins", type=int, help="override histogram.bins")
    sub.add_argument("--out", type=Path, help="override output_dir (relative to the working directory)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="moljunction",
        description="Vibronic densities of states and sequential-tunnelling transport for molecular junctions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("params", help="derive Doktorov parameters for both directions")
    p.add_argument("molecule", type=Path, help="molecule JSON file")
    p.add_argument("-o", "--output", type=Path, help="parameters file (default: <molecule>.params.json)")

    for name, text in (
        ("sample", "draw vibronic samples and write histograms"),
        ("iv", "write the I-V curve and rates"),
        ("map", "write the dI/dV map over the gate grid"),
    ):
        _add_run_flags(subs.add_parser(name, help=text))

    v = subs.add_parser("verify", help="run the built-in cross-checks")
    v.add_argument("--scale", choices=["small"], default="small")
    v.add_argument("--perturb-squeeze", action="store_true", help=argparse.SUPPRESS)
    return parser


def _overrides(args):
    return {
        "sampler.seed": args.seed,
        "sampler.sample_count": args.samples,
        "histogram.bins": args.bins,
        "output_dir": str(args.out.resolve()) if args.out is not None else None,
    }


def cmd_params(args):
    params, diagnostics = pipeline.params_document(args.molecule)
    out = args.output or args.molecule.with_suffix(".params.json")
    io.write_json(out, params)
    print(f"wrote {out}")
    print(json.dumps(diagnostics, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sample(args):
    cfg = pipeline.RunConfig.load(args.config, _overrides(args))
    results = pipeline.run_sample(cfg)
    for direction, res in results.items():
        print(
            f"{direction}: captured mass {res.distribution.captured_mass:.12f}, "
            f"{res.histogram.out_of_range}/{res.histogram.total_samples} samples outside the window"
        )
    print(f"wrote {cfg.output_dir}")
    return EXIT_OK


def cmd_iv(args):
    cfg = pipeline.RunConfig.load(args.config, _overrides(args))
    pipeline.run_iv(cfg)
    print(f"wrote {cfg.output_dir / 'iv.csv'} and {cfg.output_dir / 'rates.csv'}")
    return EXIT_OK


def cmd_map(args):
    cfg = pipeline.RunConfig.load(args.config, _overrides(args))
    pipeline.run_map(cfg)
    print(f"wrote {cfg.output_dir / 'map.csv'}")
    return EXIT_OK


def cmd_verify(args):
    results = run_verification(perturb_squeeze=args.perturb_squeeze, scale=args.scale)
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "params": cmd_params,
    "sample": cmd_sample,
    "iv": cmd_iv,
    "map": cmd_map,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalContractError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
