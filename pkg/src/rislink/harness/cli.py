"""Command-line entry point: ``rislink {snr-cdf,csi-error,td3-train,calibrate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from rislink.harness.config import load_config
from rislink.harness.experiments import run
from rislink.harness.report import check_fingerprint, write_report
from rislink.numerics import ParameterError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rislink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("snr-cdf", "SNR distribution of optimised vs relay RIS, with and without direct link"),
        ("csi-error", "normalised cascade gain under CSI phase mismatch"),
        ("td3-train", "TD3 phase optimisation of the multi-actuator sum rate"),
        ("calibrate", "fit the link budget to the SNR median anchors"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="INI configuration file")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides the config)")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--trials", type=int, help="Monte-Carlo trials (per bar for csi-error)")
        p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
        p.add_argument("--check", action="store_true",
                       help="refuse to overwrite output produced by a different configuration")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, kind=args.command, seed=args.seed, trials=args.trials,
                          overrides=args.override, output=args.out)
        out = Path(cfg.output)
        if args.check and (out / "report.json").exists():
            check_fingerprint(out / "report.json", cfg.fingerprint())
        report = run(cfg)
        paths = write_report(report, out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
