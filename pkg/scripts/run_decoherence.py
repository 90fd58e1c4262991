#!/usr/bin/env python3
"""Decoherence-rate scan: fitted Gamma(d) against Lambda (1 - e^(-d^2/4 r_c^2))."""

import argparse

from grwlab.collapse import CollapseParams
from grwlab.experiments import DecoherenceConfig, decoherence_scan
from grwlab.units import convert_rate_to_si


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-traj", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=21)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--separations", default="0.5,2,10", help="in units of r_c")
    args = ap.parse_args()

    params = CollapseParams(convert_rate_to_si(2.0), 1.0)
    seps = [float(s) * params.r_c for s in args.separations.split(",")]
    reports = decoherence_scan(
        seps, params, args.n_traj, DecoherenceConfig(), args.seed, args.threads
    )
    print(f"{'d/rc':>6} {'fit':>12} {'analytic':>12} {'rel err':>9} {'R^2':>8}")
    for d, rep in zip(seps, reports):
        gamma = rep.fit_diagnostics["gamma_analytic_internal"]
        rel = (rep.estimate - gamma) / gamma if gamma else float("nan")
        print(
            f"{d / params.r_c:>6.1f} {rep.estimate:>12.5g} {gamma:>12.5g} "
            f"{rel:>+9.2%} {rep.fit_diagnostics['r2']:>8.4f}"
        )


if __name__ == "__main__":
    main()
