#!/usr/bin/env python3
"""Fringe-visibility suppression: measured V/V_ideal vs exp(-Gamma t)."""

import argparse

import numpy as np

from grwlab.collapse import CollapseParams
from grwlab.experiments import VisibilityConfig, visibility_experiment
from grwlab.units import convert_rate_to_si


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-traj", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=23)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--gamma-t", default="0.5,1,2,5")
    args = ap.parse_args()

    rc, d = 4.0, 64.0
    gamma = 1.0 * (1 - np.exp(-(d**2) / (4 * rc**2)))
    params = CollapseParams(convert_rate_to_si(1.0), rc)
    cfg = VisibilityConfig()
    print(f"{'Gamma t':>8} {'ratio':>8} {'stderr':>8} {'exp(-Gt)':>9}")
    for gt in (float(g) for g in args.gamma_t.split(",")):
        res = visibility_experiment(
            d, params, gt / gamma, args.n_traj, cfg, args.seed, args.threads
        )
        print(
            f"{gt:>8.2f} {res['ratio']:>8.4f} {res['ratio_stderr']:>8.4f} "
            f"{res['V_analytic']:>9.4f}"
        )


if __name__ == "__main__":
    main()
