"""Secure-DOF slopes of the two-receiver scheme for a range of transmitter counts."""

import argparse

import numpy as np

from xana.bounds import sdof_lower_xncm, sdof_upper_xncm
from xana.harness import ScenarioConfig, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'M':>3} {'target':>8} {'upper':>8} {'mean slope':>11} {'max |err|':>10} {'max leak':>10} {'min delta':>10}")
    for M in args.M:
        res = run_scenario(ScenarioConfig(scheme="mx2", M=M, trials=args.trials, seed=args.seed))
        done = res.completed()
        target = float(sdof_lower_xncm(M, 2))
        slopes = np.array([t.rate_slopes["network"].slope for t in done])
        leak = max(abs(s.slope) for t in done for s in t.leakage_slopes.values())
        delta = min(min(t.reports[-1].delta.values()) for t in done)
        print(
            f"{M:>3} {target:>8.4f} {float(sdof_upper_xncm(M, 2)):>8.4f} {slopes.mean():>11.5f} "
            f"{np.abs(slopes - target).max():>10.2e} {leak:>10.2e} {delta:>10.4f}"
        )


if __name__ == "__main__":
    main()
