"""Command-line entry point: ``rankstream {aggregate,simulate,bounds,rho-opt,sample}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import aggregation, harness, mallows, theory
from .permutation import MAX_ENUMERATION_SIZE, Permutation, identity

EXIT_USAGE = 1
EXIT_DATA = 2


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_votes(path: str | Path) -> list[aggregation.WeightedVote]:
    """Parse ``[weight;]r1,...,rn`` lines; blank lines and ``#`` comments are skipped."""
    votes = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                if ";" in line:
                    weight_text, ranks_text = line.split(";", 1)
                    weight = float(weight_text)
                else:
                    weight, ranks_text = 1.0, line
                vote = aggregation.WeightedVote(Permutation.parse(ranks_text), weight)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if votes and len(vote.ranking) != len(votes[0].ranking):
                raise DataError(f"{path}:{lineno}: ranking size differs from earlier lines")
            votes.append(vote)
    if not votes:
        raise DataError(f"{path}: no votes")
    return votes


def aggregate(votes: Sequence[aggregation.WeightedVote], method: str, rho: float = 1.0) -> Permutation:
    rankings = [v.ranking for v in votes]
    if method == "borda":
        if all(v.weight == 1 for v in votes):
            return aggregation.borda(rankings)[1]
        return aggregation.weighted_borda(votes)[1]
    if method == "uborda":
        if any(v.weight != 1 for v in votes):
            faded = aggregation.fading_votes(rankings, rho)
            combined = [aggregation.WeightedVote(f.ranking, f.weight * v.weight) for f, v in zip(faded, votes)]
            return aggregation.weighted_borda(combined)[1]
        state = aggregation.UBordaState(len(rankings[0]), rho)
        for r in rankings:
            state.update(r)
        return state.ranking()
    if method == "kemeny":
        if len(rankings[0]) > MAX_ENUMERATION_SIZE:
            raise DataError(f"kemeny refused for n={len(rankings[0])} > {MAX_ENUMERATION_SIZE}")
        return aggregation.kemeny_exact(votes)
    if method == "copeland":
        return aggregation.copeland(aggregation.pairwise_matrices(votes))
    raise ValueError(f"unknown method {method!r}")


def _rho_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad rho list {text!r}") from None
    if any(not 0 < r <= 1 for r in values):
        raise argparse.ArgumentTypeError("every rho must lie in (0, 1]")
    return values


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}, expected i,j") from None
    return i, j


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankstream", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("aggregate", help="aggregate a votes file into one ranking")
    p.add_argument("votes_file")
    p.add_argument("--method", choices=("borda", "uborda", "kemeny", "copeland"), default="borda")
    p.add_argument("--rho", type=float, default=1.0, help="fading factor for uborda (oldest line first)")

    p = sub.add_parser("simulate", help="drift experiment, writes records.csv and summary.csv")
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--rho", type=_rho_list, default=(0.8, 0.9295, 1.0))
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")

    p = sub.add_parser("bounds", help="recovery bounds after an adjacent swap drift")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--theta", type=float, default=None, help="default: a third of the uniform mean distance")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--pair", type=_pair, default=(1, 2), help="swapped items i,j of the identity center")
    p.add_argument("--delta-ij", type=float, default=None, dest="gap", help="override the expected-rank gap")

    p = sub.add_parser("rho-opt", help="fading factor that best recovers after m rankings")
    p.add_argument("--m", type=int, default=20)

    p = sub.add_parser("sample", help="draw rankings from a Mallows model")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--center", type=Permutation.parse, default=None)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_aggregate(args) -> None:
    if args.method == "uborda" and not 0 < args.rho <= 1:
        raise argparse.ArgumentTypeError("rho must lie in (0, 1]")
    print(aggregate(read_votes(args.votes_file), args.method, args.rho))


def _cmd_simulate(args) -> None:
    if args.n < 2 or args.T < 1 or args.runs < 1:
        raise argparse.ArgumentTypeError("need n >= 2, T >= 1, runs >= 1")
    out = Path(args.out)
    if not out.is_dir():
        raise DataError(f"output directory {out} does not exist")
    config = harness.ExperimentConfig(args.n, args.T, args.rho, args.runs, args.seed)
    records = harness.run_experiment(config)
    try:
        harness.write_records_csv(records, out / "records.csv")
        harness.write_summary_csv(harness.summarize(records), out / "summary.csv")
    except OSError as exc:
        raise DataError(str(exc)) from None


def _cmd_bounds(args) -> None:
    if not 0 < args.rho < 1 or not 0 < args.delta < 1:
        raise argparse.ArgumentTypeError("rho and delta must lie in (0, 1)")
    theta = args.theta if args.theta is not None else harness.default_theta(args.n)
    inputs = theory.DriftBoundInputs(args.n, args.rho, theta, args.delta, args.pair)
    gap = args.gap
    if gap is None:
        if args.n > mallows.MAX_EXACT_RANK_SIZE:
            raise DataError(f"exact gap needs n <= {mallows.MAX_EXACT_RANK_SIZE}; pass --delta-ij")
        i, j = sorted(args.pair)
        gap = theory.delta_ij(mallows.MallowsModel(identity(args.n), theta), i, j)
    hp = theory.hp_recovery_bound(inputs, gap=gap)
    print(f"theta: {theta:.6f}")
    print(f"expected_bound: {theory.expected_recovery_bound(args.rho):.6f}")
    print(f"delta_ij: {gap:.6f}")
    print(f"hp_bound: {'infeasible' if math.isinf(hp) else f'{hp:.6f}'}")


def _cmd_rho_opt(args) -> None:
    if args.m < 1:
        raise argparse.ArgumentTypeError("m must be at least 1")
    print(f"{theory.optimal_rho(args.m):.6f}")


def _cmd_sample(args) -> None:
    center = args.center or (identity(args.n) if args.n else None)
    if center is None:
        raise argparse.ArgumentTypeError("pass --center or --n")
    if args.n is not None and args.n != len(center):
        raise argparse.ArgumentTypeError("--n disagrees with --center")
    model = mallows.MallowsModel(center, args.theta)
    rng = np.random.default_rng(args.seed)
    for row in mallows.sample_many(model, args.count, rng):
        print(",".join(map(str, row)))


COMMANDS = {
    "aggregate": _cmd_aggregate,
    "simulate": _cmd_simulate,
    "bounds": _cmd_bounds,
    "rho-opt": _cmd_rho_opt,
    "sample": _cmd_sample,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on --help and on usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        print(f"rankstream: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"rankstream: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
