"""Command-line entry point.

Subcommands: simulate-usm, simulate-balance, offline, verify.  Exit
codes: 0 success, 1 configuration error, 2 runtime error, 3 the
submodularity verifier found a violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, InvalidInstanceError, SizeError, UsmError
from .harness import ExperimentConfig, run_experiment, write_results


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; route everything through ConfigError
    # so the documented exit code (1) applies.
    def error(self, message: str):
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser, *, alpha_default: str) -> None:
    p.add_argument("--rounds", type=int, required=True, help="rounds per trial (required)")
    p.add_argument("--subroutine", default="balancer",
                   choices=["balancer", "mw", "uniform", "always-yes", "always-no"])
    p.add_argument("--alpha", type=float, default=None,
                   help=f"regret factor in (0, 1]; default {alpha_default}")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="result file; summary prints to stdout either way")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary-only", action="store_true", help="omit per-round rows from the output file")


def build_parser() -> _Parser:
    parser = _Parser(prog="onlineusm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_usm = sub.add_parser("simulate-usm", help="online submodular maximization game")
    p_usm.add_argument("--n", type=int, required=True, help="ground set size (required)")
    p_usm.add_argument("--adversary", default="cycle-random:k=4",
                       help="cycle-random:k=4[,density=..] | fixed-random[:density=..] | "
                            "fresh-random[:density=..] | cycle-files:a.dg;b.dg | fixed-file:a.dg | "
                            "adaptive:punish-last-set")
    p_usm.add_argument("--keep-transcripts", action="store_true",
                       help="retain round transcripts and add replay diagnostics to the summary (json)")
    _add_common(p_usm, alpha_default="0.5")

    p_bal = sub.add_parser("simulate-balance", help="balance subproblem game")
    p_bal.add_argument("--adversary", default="pattern:URL",
                       help="pattern:<string over U,R,L> | adaptive:punish-last | adaptive:reward-chase")
    _add_common(p_bal, alpha_default="1")

    p_off = sub.add_parser("offline", help="offline baselines on one instance")
    p_off.add_argument("--graph", default=None, help="graph file; omit to generate a random instance")
    p_off.add_argument("--n", type=int, default=None, help="size of the random instance")
    p_off.add_argument("--density", type=float, default=0.5)
    p_off.add_argument("--trials", type=int, default=10000, help="randomized double-greedy repetitions")
    p_off.add_argument("--seed", type=int, default=0)
    p_off.add_argument("--output", default=None)
    p_off.add_argument("--format", default="json", choices=["csv", "json"])

    p_ver = sub.add_parser("verify", help="submodularity check of a graph file's cut function")
    p_ver.add_argument("graph", help="graph file to verify")
    p_ver.add_argument("--samples", type=int, default=None,
                       help="randomized triples instead of the exhaustive check (needed for n > 16)")
    p_ver.add_argument("--seed", type=int, default=0)

    return parser


def parse_config(argv) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    game = {"simulate-usm": "usm", "simulate-balance": "balance"}.get(args.command, args.command)
    fields = {k: v for k, v in vars(args).items() if k != "command"}
    return ExperimentConfig(game=game, **fields).validated()


def main(argv=None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        rows, summary = run_experiment(config)
        if config.output:
            write_results(rows, summary, config.format, config.output,
                          config=config, summary_only=config.summary_only)
            print(f"wrote {len(rows)} rows to {config.output}", file=sys.stderr)
        print(json.dumps(summary, indent=1))
        if config.game == "verify" and not summary["passed"]:
            return 3
        return 0
    except (ConfigError, SizeError, InvalidInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsmError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
