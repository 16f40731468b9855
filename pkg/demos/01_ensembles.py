#!/usr/bin/env python3
"""
Random matrix ensembles: Ginibre, Haar, and the polar bridge
============================================================

Walks through the two ensembles everything else is built from:

  1) Complex Ginibre matrices normalized so E |Y(i,j)|^2 = 1/N,
     whose singular values follow the quarter-circle law on [0, 2].
  2) Haar unitaries drawn by QR with the phase correction that makes
     the distribution exactly translation invariant.
  3) The polar decomposition Y = U |Y| that ties the two together:
     the angular factor of a Ginibre matrix IS Haar distributed.

Usage:
    python3 demos/01_ensembles.py
"""

import numpy as np

from expanderlab.sampling import (
    SeedStream,
    hermitian_modulus,
    polar_decompose,
    sample_ginibre,
    sample_haar_unitary,
)

SEED = 7


def text_histogram(values, lo, hi, bins=24, width=46):
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    peak = counts.max()
    for c, a, b in zip(counts, edges, edges[1:]):
        bar = "#" * int(round(width * c / peak))
        print(f"  {a:5.2f}..{b:5.2f} |{bar}")


def main():
    root = SeedStream(SEED)

    print("== Ginibre normalization ==")
    N, trials = 64, 200
    traces = [np.vdot(y, y).real / N
              for y in (sample_ginibre(N, root.child(0, t)) for t in range(trials))]
    print(f"E tr(Y*Y)/N over {trials} draws at N={N}: {np.mean(traces):.4f}"
          f" (target 1, spread {np.std(traces):.4f})")

    print()
    print("== Quarter-circle law ==")
    svals = np.concatenate([
        np.linalg.svd(sample_ginibre(N, root.child(1, t)), compute_uv=False)
        for t in range(60)])
    print(f"{svals.size} singular values at N={N}; edge near 2:")
    text_histogram(svals, 0.0, 2.2)
    print(f"  mean {svals.mean():.4f} vs 8/(3 pi) = {8 / (3 * np.pi):.4f}")

    print()
    print("== Haar unitarity ==")
    u = sample_haar_unitary(8, root.child(2))
    print(f"|| U U* - I || at N=8: {np.linalg.norm(u @ u.conj().T - np.eye(8)):.2e}")
    entries = [abs(sample_haar_unitary(10, root.child(3, t))[0, 0]) ** 2
               for t in range(4000)]
    print(f"E |U(1,1)|^2 at N=10 over 4000 draws: {np.mean(entries):.4f}"
          f" (target 1/N = 0.1)")

    print()
    print("== Polar bridge ==")
    y = sample_ginibre(5, root.child(4))
    u, m = polar_decompose(y)
    print(f"reconstruction || U |Y| - Y ||: {np.linalg.norm(u @ m - y):.2e}")
    print(f"angular factor unitary to {np.linalg.norm(u @ u.conj().T - np.eye(5)):.2e}")
    print(f"modulus matches hermitian_modulus to "
          f"{np.linalg.norm(m - hermitian_modulus(y)):.2e}")
    diag = np.diagonal(m).real
    print(f"diagonal of |Y| at N=5: {np.round(diag, 3)} "
          f"(entries hover near the quarter-circle mean)")


if __name__ == "__main__":
    main()
