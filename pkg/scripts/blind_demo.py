"""Blind scheme: print the beamformers and selection matrix, then audit one draw."""

import argparse

import numpy as np

from xana.harness import ScenarioConfig, build_trial, run_scenario
from xana.schemes import blind_beamformers
from xana.verify import check_alignment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()

    cfg = ScenarioConfig(scheme="blind", M=args.M, trials=args.trials, experimental_blind=args.M > 3)
    phis, V = blind_beamformers(args.M)
    np.set_printoptions(linewidth=160)
    for k, phi in phis.items():
        print(f"Phi[{k}] ({phi.shape[0]}x{phi.shape[1]}):\n{phi.astype(int)}")
    print(f"V:\n{V.astype(int)}\n")

    ch, plan = build_trial(cfg, 0)
    print(check_alignment(plan, ch).table())

    res = run_scenario(cfg)
    slopes = [t.rate_slopes[k].slope for t in res.completed() for k in (1, 2)]
    print(f"\nper-receiver slope over {len(res.completed())} draws: "
          f"mean {np.mean(slopes):.5f}, target {(args.M - 1) / (args.M + 1):.5f}")


if __name__ == "__main__":
    main()
