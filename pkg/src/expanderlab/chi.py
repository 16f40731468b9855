"""The twirling channel ``T = E(|Y| (.) |Y|)`` and its traceless eigenvalue.

By rotational invariance of the Ginibre ensemble the channel is a
combination ``T = P + chi (I - P)`` of the projection onto multiples of
the identity and its complement, so a single number ``chi_N`` carries
all of its spectral content on the traceless subspace.  The module
estimates ``chi_N`` three independent ways, checks the claimed channel
structure against batch-estimated Monte Carlo fluctuation, and probes
two exact identities the structure rests on (rotational invariance of
the sample mean, and the factorization of a Ginibre tensor square
through its polar parts).

All estimators draw trial ``t`` from ``stream.child(t)`` (and matrix
``j`` inside a trial from ``stream.child(t, j)``), so different
estimators run on bit-identical samples when given the same stream.
Auxiliary draws such as conjugation unitaries use child indices offset
by 10**9 to stay clear of trial indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .sampling import hermitian_modulus, polar_decompose, sample_haar_unitary, sample_ginibre
from .superop import DENSIFY_CAP

__all__ = [
    "AUX_PATH_OFFSET",
    "ChiEstimate",
    "check_polar_factorization",
    "check_rotational_invariance",
    "estimate_chi_entrywise",
    "estimate_chi_limit",
    "estimate_chi_spectral",
    "estimate_chi_trace_formula",
]

# Child index base for non-trial draws (conjugation unitaries etc.).
AUX_PATH_OFFSET = 10 ** 9


@dataclass(frozen=True)
class ChiEstimate:
    """Monte Carlo estimate of the traceless-subspace eigenvalue.

    ``extras`` carries method-specific diagnostics, e.g. the structure
    residual of the spectral method.
    """

    N: int
    chi_hat: float
    stderr: float
    trials: int
    method: str
    extras: dict = field(default_factory=dict, compare=False)


def _check_args(N, trials):
    if N < 2:
        raise ValueError(f"chi needs N >= 2 (no off-diagonal pairs at N={N})")
    if trials < 2:
        raise ValueError(f"need at least 2 trials for a variance estimate, got {trials}")


def _check_dense(N):
    # The dense checks build N^2 x N^2 means; keep them under the same
    # cap as densification.
    if N * N > DENSIFY_CAP:
        raise ValueError(
            f"dense channel estimate is {N * N} x {N * N} but the cap is "
            f"{DENSIFY_CAP}; use the entrywise or trace-formula estimator")


def _mean_stderr(values):
    values = np.asarray(values)
    return float(np.mean(values)), float(np.std(values, ddof=1) / np.sqrt(len(values)))


def estimate_chi_entrywise(N, trials, stream):
    """Estimate chi as the mean off-diagonal product ``E |Y|_ii |Y|_jj``.

    Averages ``|Y|_ii |Y|_jj`` over all ordered pairs i != j within each
    sample, then over samples.
    """
    _check_args(N, trials)
    vals = np.empty(trials)
    for t in range(trials):
        y = sample_ginibre(N, stream.child(t))
        d = np.diagonal(hermitian_modulus(y)).real
        prods = np.outer(d, d)
        np.fill_diagonal(prods, 0.0)
        vals[t] = prods.sum() / (N * (N - 1))
    chi_hat, stderr = _mean_stderr(vals)
    return ChiEstimate(N=N, chi_hat=chi_hat, stderr=stderr, trials=trials,
                       method="entrywise")


def estimate_chi_trace_formula(N, trials, stream):
    """Estimate chi from the trace identity ``(tr|Y|)^2 - sum_j |Y|_jj^2``.

    Per sample this statistic coincides with the entrywise one exactly
    (the off-diagonal pair sum is a square of a sum minus a sum of
    squares), so the two methods agree to round-off on shared streams.
    The mean squared diagonal entry is reported in ``extras`` together
    with its standard error; it stays at or below 1.
    """
    _check_args(N, trials)
    vals = np.empty(trials)
    diag_sq = np.empty(trials)
    for t in range(trials):
        y = sample_ginibre(N, stream.child(t))
        d = np.diagonal(hermitian_modulus(y)).real
        tr = d.sum()
        sq = (d ** 2).sum()
        vals[t] = (tr * tr - sq) / (N * (N - 1))
        diag_sq[t] = sq / N
    chi_hat, stderr = _mean_stderr(vals)
    dmean, dstderr = _mean_stderr(diag_sq)
    return ChiEstimate(N=N, chi_hat=chi_hat, stderr=stderr, trials=trials,
                       method="trace_formula",
                       extras={"mean_sq_diagonal": dmean, "stderr_sq_diagonal": dstderr})


def _batch_edges(trials, batches):
    batches = min(batches, trials)
    edges = np.linspace(0, trials, batches + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _fluctuation_scale(batch_means, full_mean):
    """Frobenius-scale standard error of a matrix mean from batch means."""
    b = len(batch_means)
    if b < 2:
        return float("inf")
    dev = sum(np.linalg.norm(bm - full_mean) ** 2 for bm in batch_means)
    return float(np.sqrt(dev / (b - 1) / b))


def _twirl_sample(N, stream, t):
    m = hermitian_modulus(sample_ginibre(N, stream.child(t)))
    return m, np.kron(m, m.conj())


def estimate_chi_spectral(N, trials, stream, batches=10):
    """Estimate chi from the densified sample mean of ``|Y| (.) |Y|``.

    Builds the dense channel estimate, symmetrizes it, and reads chi off
    as the mean eigenvalue on the orthogonal complement of ``vec(I)``.
    ``extras`` reports how far the estimate sits from the projected form
    ``P + chi (I - P)`` (operator norm) and from fixing the identity,
    both against the batch-split fluctuation scale.
    """
    _check_args(N, trials)
    _check_dense(N)
    d = N * N
    ident = np.eye(N, dtype=complex)
    v_unit = ident.reshape(-1) / np.sqrt(N)
    vals = np.empty(trials)
    total = np.zeros((d, d), dtype=complex)
    batch_sums = []
    for a, b in _batch_edges(trials, batches):
        bsum = np.zeros((d, d), dtype=complex)
        for t in range(a, b):
            m, k = _twirl_sample(N, stream, t)
            bsum += k
            tr_m = np.trace(m).real
            vals[t] = (tr_m * tr_m - np.trace(m @ m).real / N) / (d - 1)
        batch_sums.append((bsum, b - a))
        total += bsum
    t_hat = total / trials
    t_hat = (t_hat + t_hat.conj().T) / 2.0
    chi_hat, stderr = _mean_stderr(vals)

    p_mat = np.outer(ident.reshape(-1), ident.reshape(-1)) / N
    model = p_mat + chi_hat * (np.eye(d) - p_mat)
    residual = float(np.linalg.svd(t_hat - model, compute_uv=False)[0])
    fluct = _fluctuation_scale([s / c for s, c in batch_sums], t_hat)
    identity_residual = float(np.linalg.norm(
        (t_hat @ ident.reshape(-1)).reshape(N, N) - ident))
    return ChiEstimate(
        N=N, chi_hat=chi_hat, stderr=stderr, trials=trials, method="spectral",
        extras={
            "structure_residual": residual,
            "identity_residual": identity_residual,
            "fluctuation": fluct,
            "projector_overlap": float(np.real(v_unit @ t_hat @ v_unit)),
        })


def estimate_chi_limit():
    """Asymptotic lower bound for chi: the squared quarter-circle mean.

    The normalized singular-value density of a Ginibre matrix converges
    to ``sqrt(4 - s^2)/pi`` on [0, 2]; the square of its mean, computed
    here by adaptive quadrature, is where ``chi_N`` settles as N grows.
    The closed form is ``(8 / (3 pi))^2``, about 0.720507.
    """
    mean, _ = scipy.integrate.quad(
        lambda s: s * np.sqrt(4.0 - s * s) / np.pi, 0.0, 2.0, epsabs=1e-12)
    return float(mean * mean)


def check_rotational_invariance(N, trials, stream, n_conjugations=5, batches=10):
    """Conjugate the sampled channel by Haar twirls and compare.

    The exact channel satisfies ``(U x U) T (U x U)* = T`` for every
    unitary U; the sampled estimate can only match to Monte Carlo noise.
    For each of ``n_conjugations`` independent Haar draws the report
    records the operator-norm change relative to the batch-estimated
    fluctuation scale; every ratio at or below 5 counts as a pass.
    """
    _check_args(N, trials)
    _check_dense(N)
    d = N * N
    total = np.zeros((d, d), dtype=complex)
    batch_means = []
    for a, b in _batch_edges(trials, batches):
        bsum = np.zeros((d, d), dtype=complex)
        for t in range(a, b):
            _, k = _twirl_sample(N, stream, t)
            bsum += k
        total += bsum
        batch_means.append(bsum / (b - a))
    t_hat = total / trials
    fluct = _fluctuation_scale(batch_means, t_hat)

    ratios = []
    for u_idx in range(n_conjugations):
        u = sample_haar_unitary(N, stream.child(AUX_PATH_OFFSET + u_idx))
        w = np.kron(u, u.conj())
        conj = w @ t_hat @ w.conj().T
        change = float(np.linalg.svd(conj - t_hat, compute_uv=False)[0])
        ratios.append(change / fluct)
    return {
        "N": N,
        "trials": trials,
        "n_conjugations": n_conjugations,
        "fluctuation": fluct,
        "ratios": ratios,
        "max_ratio": max(ratios),
        "passed": all(r <= 5.0 for r in ratios),
    }


def check_polar_factorization(N, coeffs, trials, stream, batches=10):
    """Check the polar factorization of the averaged Ginibre tensor sum.

    Each Ginibre tensor square factors exactly through its polar parts,
    ``Y (.) Y* = (U (.) U*) composed with (|Y| (.) |Y|)``; averaging and
    using independence of the two parts, the mean of the traceless-
    projected sum ``sum_j a_j Y_j (.) Y_j`` must match the mean unitary
    sum composed with the pooled channel estimate.  The report compares
    the Frobenius residual of the two densified sample means against the
    batch fluctuation of their difference.
    """
    _check_args(N, trials)
    _check_dense(N)
    coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
    n = coeffs.size
    if n == 0:
        raise ValueError("need at least one coefficient")
    d = N * N
    ident_flat = np.eye(N, dtype=complex).reshape(-1)
    proj = np.eye(d, dtype=complex) - np.outer(ident_flat, ident_flat) / N

    batch_diffs = []
    lhs_total = np.zeros((d, d), dtype=complex)
    u_total = np.zeros((d, d), dtype=complex)
    k_total = np.zeros((d, d), dtype=complex)
    count_total = 0
    for a, b in _batch_edges(trials, batches):
        lhs_sum = np.zeros((d, d), dtype=complex)
        u_sum = np.zeros((d, d), dtype=complex)
        k_sum = np.zeros((d, d), dtype=complex)
        for t in range(a, b):
            for j in range(n):
                y = sample_ginibre(N, stream.child(t, j))
                u, m = polar_decompose(y)
                lhs_sum += coeffs[j] * np.kron(y, y.conj())
                u_sum += coeffs[j] * np.kron(u, u.conj())
                k_sum += np.kron(m, m.conj())
        cnt = b - a
        batch_diffs.append(
            (lhs_sum / cnt) @ proj - (u_sum / cnt) @ proj @ (k_sum / (cnt * n)))
        lhs_total += lhs_sum
        u_total += u_sum
        k_total += k_sum
        count_total += cnt
    lhs_mean = (lhs_total / count_total) @ proj
    rhs_mean = (u_total / count_total) @ proj @ (k_total / (count_total * n))
    diff = lhs_mean - rhs_mean
    residual = float(np.linalg.norm(diff))
    mean_diff = sum(batch_diffs) / len(batch_diffs)
    fluct = _fluctuation_scale(batch_diffs, mean_diff)
    return {
        "N": N,
        "n_terms": n,
        "trials": trials,
        "residual": residual,
        "fluctuation": fluct,
        "ratio": residual / fluct,
        "passed": residual <= 5.0 * fluct,
    }
