#!/usr/bin/env python3
"""Born-rule emergence: outcome frequencies vs branch weights.

Runs the measurement ensemble for several |c_up|^2 values and prints the
observed frequency, binomial error bar, and chi^2 p-value for each.
"""

import argparse

import numpy as np

from grwlab.collapse import CollapseParams
from grwlab.experiments import MeasurementConfig, born_ensemble
from grwlab.units import convert_rate_to_si


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-traj", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--weights", default="0.2,0.5,0.8")
    args = ap.parse_args()

    for p_up in (float(w) for w in args.weights.split(",")):
        cfg = MeasurementConfig(c_up=np.sqrt(p_up), c_down=np.sqrt(1 - p_up))
        params = CollapseParams(
            convert_rate_to_si(1.0), 1.0, n_nucleons=cfg.pointer_n_nucleons
        )
        rep = born_ensemble(cfg, params, args.n_traj, args.seed, args.threads)
        print(
            f"|c_up|^2 = {p_up:.2f}  freq = {rep.estimate:.4f} "
            f"+- {rep.stderr:.4f}  p(chi^2) = "
            f"{rep.fit_diagnostics['p_value']:.3f}"
        )


if __name__ == "__main__":
    main()
