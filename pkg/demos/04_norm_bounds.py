#!/usr/bin/env python3
"""
Operator norm bounds and edge concentration
===========================================

Two desk-scale probes of the asymptotic picture:

  1) The traceless unitary channel sum with n terms and coefficients
     a_j = 1/2 keeps E || S (1 - P) || below 4 C_emp (sum |a_j|^2)^(1/2)
     with C_emp = 2 / min_N chi_hat, uniformly in N.  This is the
     quantitative heart of the quantum-expander construction: the norm
     does not grow with the dimension.
  2) The Ginibre operator norm concentrates at the spectral edge 2;
     the deviation eps_hat(N) = E||Y|| - 2 shrinks as N grows.  The
     moment roots (E||Y||^p)^(1/p) barely move in p at desk scales,
     which is the concentration statement in action.

Usage:
    python3 demos/04_norm_bounds.py
"""

import math

from expanderlab.experiments import (
    ExperimentConfig,
    run_concentration_probe,
    run_theorem_sweep,
)
from expanderlab.sampling import SeedStream

SEED = 17


def main():
    print("== Norm sweep: n=4 terms, a_j = 1/2 ==")
    cfg = ExperimentConfig(N_grid=(8, 16, 32), n=4, coeffs=(0.5,) * 4,
                           q=math.inf, trials=80, chi_trials=300,
                           master_seed=SEED)
    result = run_theorem_sweep(cfg)
    print(f"{'N':>4} {'mean_norm':>10} {'stderr':>8} {'chi_hat':>8}")
    for rec in result["per_N"]:
        est = rec["mean_norm"]
        print(f"{rec['N']:>4} {est.mean:>10.4f} {est.stderr:>8.4f} "
              f"{rec['chi_hat']:>8.4f}")
    print(f"bound 4 C_emp (sum a^2)^(1/2) = {result['bound']:.3f} with "
          f"C_emp = 2/min chi = {result['C_emp']:.3f}")
    print("mean norms are flat in N and sit far below the bound.")

    print()
    print("== Ginibre edge concentration ==")
    out = run_concentration_probe([32, 64, 128], [1.0, 2.0, 4.0], 120,
                                  SeedStream(SEED).child(1))
    print(f"{'N':>4} {'eps_hat':>9} {'stderr':>8}")
    for e in out["epsilon"]:
        print(f"{e['N']:>4} {e['eps_hat']:>+9.4f} {e['stderr']:>8.4f}")
    print("the edge deviation shrinks toward 0 as N grows.")
    print()
    print(f"{'N':>4} {'p':>4} {'moment_root':>12}")
    for rec in out["records"]:
        print(f"{rec['N']:>4} {rec['p']:>4.0f} {rec['moment_root']:>12.4f}")
    print(f"fit of root growth against sqrt(p/N): beta_hat = "
          f"{out['beta_hat']:+.3f} around center {out['center']:.3f}")
    print("at these sizes the residual N-drift of the edge dominates the")
    print("tiny p-dependence, so the pooled fit can come out negative; the")
    print("flat columns above are the actual concentration signal.")


if __name__ == "__main__":
    main()
