#!/usr/bin/env python3
"""Run the quadratic rate/risk experiment and drop CSV + JSON outputs."""

import argparse

from riskgmm.experiments import run_quad_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/quad")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--paths", type=int, default=None)
    ap.add_argument("--k", type=int, default=None)
    ap.add_argument("--theta", type=float, default=None)
    args = ap.parse_args()
    summary, _, _ = run_quad_experiment(
        args.out, seed=args.seed, n_paths=args.paths, k_max=args.k, theta=args.theta
    )
    for name, info in summary["methods"].items():
        print(f"{name}: rho={info['rho']:.4f} alpha={info['alpha']:.5f}")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
