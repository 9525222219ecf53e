"""Best fading factor against recovery patience m, with the recovery bounds it implies.

    python3 scripts/rho_sweep.py --n 7 --delta 0.05
"""

import argparse

from rankstream.harness import default_theta
from rankstream.mallows import MallowsModel
from rankstream.permutation import identity
from rankstream.theory import (
    DriftBoundInputs,
    delta_ij,
    expected_recovery_bound,
    f_objective,
    hp_recovery_bound,
    optimal_rho,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 5, 10, 20, 40, 80])
    args = ap.parse_args()

    theta = default_theta(args.n)
    gap = delta_ij(MallowsModel(identity(args.n), theta), 1, 2)
    print(f"n={args.n} theta={theta:.6f} gap(1,2)={gap:.6f} delta={args.delta}")
    print(f"{'m':>4} {'rho*':>9} {'f(rho*)':>10} {'E bound':>9} {'hp bound':>9}")
    for m in args.m:
        rho = optimal_rho(m)
        inputs = DriftBoundInputs(args.n, rho, theta, args.delta, (1, 2))
        hp = hp_recovery_bound(inputs, gap=gap)
        hp_text = "infeasible" if hp == float("inf") else f"{hp:.3f}"
        print(f"{m:4d} {rho:9.6f} {f_objective(rho, m):10.4f} {expected_recovery_bound(rho):9.3f} {hp_text:>9}")


if __name__ == "__main__":
    main()
