"""Command line entry point: ``jsnlse <scenario> [--config FILE] [--out DIR] [--seed N]``.

Exit status 0 on success, 1 when a check fails, 2 on a configuration or
input error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import SCENARIOS, parse_config
from .errors import ConfigError, JSNLSError
from .io import SnapshotFormatError
from .runner import SCENARIO_RUNNERS

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsnlse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", type=Path, help="flat key = value configuration file")
        p.add_argument("--out", help="output directory (overrides out.dir)")
        p.add_argument("--seed", type=_seed, default=0, help="seed for random states")
        p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                       help="reject unknown configuration keys (default on)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, args.scenario, strict=args.strict, seed=args.seed,
                           output_dir=args.out)
        return SCENARIO_RUNNERS[args.scenario](cfg)
    except (ConfigError, SnapshotFormatError, OSError, UnicodeDecodeError) as exc:
        print(f"jsnlse {args.scenario}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except JSNLSError as exc:
        print(f"jsnlse {args.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
