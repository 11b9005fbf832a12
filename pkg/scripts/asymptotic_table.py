"""Finite-n behaviour of the asymptotic scheme: dimensions, measured slope and limits."""

import argparse

import numpy as np

from xana.bounds import achieved_sdof_finite_n, sdof_lower_xncm_ee, sdof_upper_xncm_ee
from xana.harness import ScenarioConfig, run_scenario
from xana.schemes import asymptotic_dims

CONFIGS = [(2, 2, 1), (2, 2, 2), (2, 2, 3), (3, 2, 1), (2, 3, 1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--no-eve", action="store_true")
    args = ap.parse_args()
    eve = not args.no_eve

    print(f"{'M':>2} {'K':>2} {'n':>2} {'Gamma':>5} {'mu_n':>5} {'target':>8} {'slope':>8} {'leak':>9} {'limit':>7} {'upper':>7}")
    for M, K, n in CONFIGS:
        gamma, mu_n = asymptotic_dims(M, K, n, eve)
        res = run_scenario(ScenarioConfig(scheme="asymptotic", M=M, K=K, n=n, include_eve=eve, trials=args.trials))
        done = res.completed()
        slope = np.mean([t.rate_slopes["network"].slope for t in done])
        leak = max(abs(s.slope) for t in done for s in t.leakage_slopes.values())
        target = float(achieved_sdof_finite_n(M, K, n, gamma))
        print(
            f"{M:>2} {K:>2} {n:>2} {gamma:>5} {mu_n:>5} {target:>8.4f} {slope:>8.4f} {leak:>9.1e} "
            f"{float(sdof_lower_xncm_ee(M, K)):>7.4f} {float(sdof_upper_xncm_ee(M, K)):>7.4f}"
        )


if __name__ == "__main__":
    main()
