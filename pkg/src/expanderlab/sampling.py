"""Seedable sampling of Ginibre matrices, Haar unitaries, and polar factors.

All samplers are pure functions of ``(N, stream)``: the same
:class:`SeedStream` always reproduces the same matrix, bit for bit,
regardless of call order or thread schedule.  Independence across
trials and across matrices inside one trial is obtained by deriving
child streams, never by sharing a mutable generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RankDeficiencyError",
    "SeedStream",
    "hermitian_modulus",
    "polar_decompose",
    "sample_ginibre",
    "sample_haar_unitary",
]

# Relative floor below which a matrix counts as numerically singular.
SINGULAR_RATIO_FLOOR = 1e-10


class RankDeficiencyError(ValueError):
    """Raised when a matrix is too close to singular for a stable polar factor."""

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


@dataclass(frozen=True)
class SeedStream:
    """Hierarchical deterministic randomness.

    A stream is an immutable address ``(master_seed, path)`` into a tree
    of statistically independent generators.  Experiments spawn one child
    per (experiment, trial, matrix) coordinate so that any single sample
    can be re-derived in isolation.

    Parameters
    ----------
    master_seed : int
        Root seed for the whole tree (64-bit range).
    path : tuple of int
        Position in the tree; empty for the root.
    """

    master_seed: int
    path: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.master_seed, (int, np.integer)):
            raise TypeError(f"master_seed must be an integer, got {type(self.master_seed).__name__}")
        path = tuple(int(p) for p in self.path)
        if any(p < 0 for p in path):
            raise ValueError(f"path entries must be non-negative, got {path}")
        object.__setattr__(self, "path", path)

    def child(self, *indices):
        """Return the stream addressed by appending ``indices`` to the path."""
        return SeedStream(self.master_seed, self.path + tuple(int(i) for i in indices))

    def generator(self):
        """Fresh :class:`numpy.random.Generator` for this address.

        A new generator is created on every call, so consuming draws never
        mutates the stream; the bit generator is pinned to PCG64 to keep
        sequences stable across numpy versions.
        """
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))


def _check_dim(N):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValueError(f"matrix dimension must be a positive integer, got {N!r}")
    return int(N)


def sample_ginibre(N, stream):
    """Draw one complex Ginibre matrix.

    Entries are i.i.d. ``(2N)^{-1/2} (g + i g')`` with ``g, g'`` standard
    normal, so each entry has mean zero and second absolute moment ``1/N``.

    Parameters
    ----------
    N : int
        Matrix dimension.
    stream : SeedStream
        Source of randomness; the draw is a pure function of it.

    Returns
    -------
    numpy.ndarray
        Complex ``(N, N)`` array.
    """
    N = _check_dim(N)
    rng = stream.generator()
    g = rng.standard_normal((N, N))
    gp = rng.standard_normal((N, N))
    return (g + 1j * gp) / np.sqrt(2.0 * N)


def sample_haar_unitary(N, stream):
    """Draw one Haar-distributed unitary matrix.

    Uses QR of a Ginibre draw with the diagonal phases of R divided out,
    which is distributionally identical to the unitary polar factor of the
    same draw.  Plain QR without the phase correction is *not* Haar.

    Parameters
    ----------
    N : int
        Matrix dimension.
    stream : SeedStream
        Source of randomness.

    Returns
    -------
    numpy.ndarray
        Unitary ``(N, N)`` array with ``U U^{\\dagger} = I`` to 1e-12.
    """
    N = _check_dim(N)
    rng = stream.generator()
    # A degenerate draw (zero on the R diagonal) has probability zero;
    # resample once from the same generator, then give up.
    for _ in range(2):
        z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        if np.all(np.abs(d) > 0.0):
            return q * (d / np.abs(d))
    raise RankDeficiencyError(f"degenerate Ginibre draw twice in a row at N={N}")


def _sqrt_factors(M):
    # Eigenbasis and clamped singular values of M, via M+M with negative
    # round-off eigenvalues snapped to zero so the modulus stays PSD.
    h = M.conj().T @ M
    h = (h + h.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    return v, np.sqrt(np.clip(w, 0.0, None))


def hermitian_modulus(M):
    """PSD square root ``|M| = (M^{\\dagger} M)^{1/2}`` without the unitary factor.

    Unlike :func:`polar_decompose` this accepts singular input; the
    modulus is well defined for any square matrix.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"modulus needs a square matrix, got shape {M.shape}")
    v, s = _sqrt_factors(M)
    return (v * s) @ v.conj().T


def polar_decompose(M):
    """Split ``M`` into a unitary factor and a PSD modulus, ``M = U |M|``.

    The modulus is the Hermitian square root ``(M^{\\dagger} M)^{1/2}``,
    computed by eigendecomposition with negative round-off eigenvalues
    clamped to zero so the result is always positive semidefinite.

    Parameters
    ----------
    M : numpy.ndarray
        Square complex matrix, numerically nonsingular (smallest singular
        value above ``1e-10`` times the largest).

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        The pair ``(unitary, modulus)`` with ``unitary @ modulus == M`` to
        1e-10 relative Frobenius error.

    Raises
    ------
    RankDeficiencyError
        If the singular-value ratio falls below the floor; the offending
        ratio is reported in the message and on the exception.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"polar decomposition needs a square matrix, got shape {M.shape}")
    v, s = _sqrt_factors(M)
    smax = s[-1]
    ratio = s[0] / smax if smax > 0.0 else 0.0
    if ratio <= SINGULAR_RATIO_FLOOR:
        raise RankDeficiencyError(
            f"matrix is numerically singular: singular-value ratio "
            f"{ratio:.3e} <= {SINGULAR_RATIO_FLOOR:.0e}",
            ratio=ratio,
        )
    modulus = (v * s) @ v.conj().T
    inv_sqrt = (v / s) @ v.conj().T
    unitary = M @ inv_sqrt
    return unitary, modulus
