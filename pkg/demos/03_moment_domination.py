#!/usr/bin/env python3
"""
Moment domination: unitary sums against Gaussian sums
=====================================================

The central inequality compares two random superoperators on the
Hilbert-Schmidt space: the traceless-projected unitary channel sum

    S_U = sum_j a_j U_j (.) U_j*  composed with (1 - P)

and the two-family Gaussian sum S_Y = sum_j a_j Y_j (.) Y'_j.  The
p-th moments of their Schatten-infinity norms satisfy

    E || S_U ||^p  <=  (2 / chi_N)^p  E || S_Y ||^p,

so the p-th root of the ratio must stay below 2 / chi_hat.  This demo
estimates both sides on a small grid and prints the margin.

Usage:
    python3 demos/03_moment_domination.py
"""

import math

from expanderlab.experiments import ExperimentConfig, run_lemma_comparison

SEED = 13


def main():
    print("== Unitary vs Gaussian norm moments (q = inf) ==")
    print(f"{'N':>4} {'n':>3} {'p':>3} {'ratio_root':>11} {'2/chi_hat':>10} "
          f"{'margin':>8} {'ok':>4}")
    for n, p in ((2, 1), (3, 2)):
        cfg = ExperimentConfig(
            N_grid=(8, 16), n=n, coeffs=(1 / math.sqrt(n),) * n, p=p,
            q=math.inf, trials=150, chi_trials=300, master_seed=SEED)
        for rec in run_lemma_comparison(cfg):
            margin = rec["bound"] - rec["ratio_root"]
            print(f"{rec['N']:>4} {n:>3} {p:>3} {rec['ratio_root']:>11.4f} "
                  f"{rec['bound']:>10.4f} {margin:>8.4f} "
                  f"{'yes' if rec['passed'] else 'NO':>4}")
    print()
    print("ratio_root = (E||S_U||^p / E||S_Y||^p)^(1/p); the bound uses the")
    print("chi estimate at the same N, so both columns carry Monte Carlo error.")
    print("The margin stays comfortably positive: unitary sums are the")
    print("cheaper object, Gaussian sums pay for the missing projection.")


if __name__ == "__main__":
    main()
