#!/usr/bin/env python3
"""Spontaneous heating: ensemble energy and Var(p) growth vs the closed form."""

import argparse

from grwlab.collapse import CollapseParams
from grwlab.experiments import HeatingConfig, heating_experiment
from grwlab.units import convert_rate_to_si


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-traj", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=22)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    res = heating_experiment(
        CollapseParams(convert_rate_to_si(4.0), 1.0), 5.0,
        args.n_traj, HeatingConfig(), args.seed, args.threads,
    )
    for label, slope, err, ana in (
        ("dE/dt", res["slope_energy"], res["slope_energy_stderr"],
         res["slope_energy_analytic"]),
        ("d<p^2>/dt", res["slope_p2"], res["slope_p2_stderr"],
         res["slope_p2_analytic"]),
    ):
        rel = (slope - ana) / ana
        print(f"{label:>10}: {slope:.5g} +- {err:.2g}  analytic {ana:.5g}  "
              f"({rel:+.2%})")
    print(f"mean hits per trajectory: {res['mean_hits']:.2f}")


if __name__ == "__main__":
    main()
