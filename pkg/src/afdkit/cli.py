"""Command-line interface: one subcommand per run mode.

Examples
--------
    afdkit afd --input signal.csv --n-iter 25 --output report.json
    afdkit safd2 --sigma 0.1 --noise-w 100 --seed 7 --figures figs/
    afdkit verify-appendix --params 0.5,0.5
    afdkit probe-sbvc --input signal.csv --radii 0.9,0.99

Flags override config-file fields, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import sys

from .io import MODES, InputError, RunConfig, load_config, run

_HELP = {
    "afd": "adaptive greedy decomposition of one signal",
    "poafd": "pre-orthogonalized pursuit over a kernel grid or matrix dictionary",
    "safd1": "ensemble decomposition driven by the expected signal",
    "safd2": "ensemble decomposition with one shared parameter sequence",
    "spoafd": "weighted-ensemble pursuit with one shared basis",
    "hilbert": "circular Hilbert transform of one signal",
    "verify-appendix": "check the projection identity behind kernel pre-orthogonalization",
    "probe-sbvc": "probe the expected-energy boundary decay bound",
}


def _int_flag(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def _float_flag(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None


def _csv_list(text: str) -> list[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON file of defaults for the flags below")
    parser.add_argument("--n", type=_int_flag, help="samples per signal (even, default 256)")
    parser.add_argument("--r", type=_int_flag, help="radial grid count (default 64)")
    parser.add_argument("--a", type=_int_flag, help="angular grid count (default 128)")
    parser.add_argument("--r-max", type=_float_flag, dest="r_max", help="largest grid radius (default 0.998)")
    parser.add_argument("--n-iter", type=_int_flag, dest="n_iter", help="decomposition steps (default 20)")
    parser.add_argument("--rho", type=_float_flag, help="weak-selection factor in (0, 1] (default 1.0)")
    parser.add_argument("--seed", type=_int_flag, help="noise seed (default 0)")
    parser.add_argument("--sigma", type=_float_flag, help="noise standard deviation (default 0)")
    parser.add_argument("--noise-w", type=_int_flag, dest="noise_w", help="synthetic ensemble size (default 1)")
    parser.add_argument("--params", type=_csv_list, metavar="LIST", help="disc parameters, e.g. 0.5,0.3+0.2i")
    parser.add_argument("--radii", type=_csv_list, metavar="LIST", help="probe radii in [0, 1), e.g. 0.9,0.99")
    parser.add_argument("--n-angles", type=_int_flag, dest="n_angles", help="angles per probe radius (default 128)")
    parser.add_argument("--input", metavar="FILE", help="CSV of signal rows (weight: prefix for weighted rows)")
    parser.add_argument("--output", metavar="FILE", help="JSON report destination (default stdout)")
    parser.add_argument("--figures", metavar="DIR", help="directory for rendered figures")
    parser.add_argument("--dictionary", metavar="FILE", help="CSV of dictionary atoms, one per row")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afdkit", description="Adaptive sparse decompositions on the circle.")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")
    for mode in MODES:
        _add_common(sub.add_parser(mode, help=_HELP[mode]))
    return parser


def main(argv=None) -> int:
    # Usage problems are input errors; exit 2 is reserved for failed
    # verification checks.  --help keeps its clean exit.
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    flag_cfg = {k: v for k, v in vars(args).items() if k not in ("mode", "config")}
    try:
        file_cfg = load_config(args.config) if args.config else None
        config = RunConfig.from_sources(args.mode, file_cfg, flag_cfg)
        _, code = run(config)
        return code
    except InputError as exc:
        print(f"afdkit: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"afdkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
