#!/usr/bin/env python3
"""
twoweight: command-line entry point of the two-weight Hilbert transform lab

    twoweight run --suite identities --depth 6 --seeds 0..9 --out results
    twoweight verify --scale 0.1
    twoweight run --replay results/failures/monotonicity__seed3__random_masses_random_masses.json
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from explorer.config import SUITES, build_config, load_experiment_config
from explorer.reporting import RunReport, __version__
from explorer.runner import FAULTS, replay, run, verify
from models.errors import TwoWeightError
from providers import FamilyRegistry

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

# flag dest -> ExperimentConfig field
FLAG_FIELDS = {
    "depth": "depth",
    "eps": "epsilon",
    "r": "r",
    "goodness_form": "goodness_form",
    "seeds": "seeds",
    "sigma_family": "sigma_family",
    "w_family": "w_family",
    "suite": "suite",
    "out": "out",
    "delta": "delta",
    "budget": "budget",
    "samples": "samples",
    "threads": "threads",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoweight", description="Two-weight Hilbert transform computational lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config; flags override its values")
    common.add_argument("--depth", type=int, help="Tree depth D")
    common.add_argument("--eps", type=float, help="Goodness exponent ε in (0, 1/2)")
    common.add_argument("--r", type=int, help="Goodness gap r ≥ 2")
    common.add_argument("--goodness-form", choices=["children", "boundary"], help="Tree goodness form")
    common.add_argument("--seeds", help="Seeds as a..b (inclusive) or a,b,c")
    common.add_argument("--sigma-family", help="σ families, comma separated (name or name:param)")
    common.add_argument("--w-family", help="w families, comma separated (name or name:param)")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--delta", type=float, help="Kernel truncation δ")
    common.add_argument("--budget", type=int, help="Alternating-maximization iterations")
    common.add_argument("--samples", type=int, help="Sampled test functions per family")
    common.add_argument("--threads", type=int, help="Worker threads (default TWOWEIGHT_THREADS or CPU count)")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    run_parser = commands.add_parser("run", parents=[common], help="Run suites over the seed × family grid")
    run_parser.add_argument("--suite", choices=SUITES, help="Suite selection")
    run_parser.add_argument("--replay", metavar="PATH", help="Re-run the instance behind a failure file")

    verify_parser = commands.add_parser("verify", parents=[common], help="Run the assertable battery")
    verify_parser.add_argument("--inject-fault", choices=FAULTS, help="Test hook: run the battery under a known fault")
    verify_parser.add_argument("--scale", type=float, default=1.0, help="Multiply every battery count")
    return parser


def _families(registry: FamilyRegistry, value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [registry.resolve(name.strip()).label for name in value.split(",") if name.strip()]


def config_from_args(args: argparse.Namespace, registry: FamilyRegistry):
    """The --config file, or the catalogue defaults and battery without one; flags override either"""
    flags: Dict[str, Any] = {}
    for dest, name in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            flags[name] = value
    for side in ("sigma_family", "w_family"):
        if side in flags:
            flags[side] = _families(registry, flags[side])
    if args.config:
        return load_experiment_config(args.config, flags)
    return build_config({**registry.defaults, "battery": registry.battery, **flags}, "<command line>")


def print_summary(report: RunReport) -> None:
    print(f"\n📋 {len(report.results)} checks")
    for check, row in report.summary().items():
        mark = "✅" if row["passed"] else "❌"
        value = "" if row["max_value"] is None else f", max value {row['max_value']:.6g}"
        print(f"  {mark} {check} ({row['suite']}): {row['instances']} instances, {row['failed']} failed{value}")
    if report.decay_exponent is not None:
        print(f"\n📈 Observed Poisson decay exponent: {report.decay_exponent:.4f}")
    for result in report.failed[:20]:
        where = f" -> {result.instance_path}" if result.instance_path else ""
        print(f"  ❌ {result.suite}/{result.check} seed {result.seed} ({result.family}): {result.detail}{where}")
    print(f"\n⏱️  {report.wall_clock:.2f}s, exit code {report.exit_code}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        if args.command == "run" and args.replay:
            record, identical = replay(args.replay)
            reproduced = bool(record["failed"])
            print(f"🔁 {record['check']} seed {record['seed']} ({record['family']}): ", end="")
            print("failure reproduced" if reproduced else "passes now", end="")
            print(", byte-identical record" if identical else ", record differs")
            return EXIT_FAILED if reproduced else EXIT_OK

        registry = FamilyRegistry()
        config = config_from_args(args, registry)
        if args.command == "run":
            report = run(config)
        else:
            report = verify(config, args.inject_fault, args.scale)
    except TwoWeightError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG

    print_summary(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
