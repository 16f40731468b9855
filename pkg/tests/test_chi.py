"""Twirling-channel eigenvalue: estimators, limit, structural checks."""

import numpy as np
import pytest
import scipy.integrate

from expanderlab.chi import (
    check_polar_factorization,
    check_rotational_invariance,
    estimate_chi_entrywise,
    estimate_chi_limit,
    estimate_chi_spectral,
    estimate_chi_trace_formula,
)
from expanderlab.sampling import SeedStream, sample_ginibre, sample_haar_unitary
from expanderlab.spectral import trace_norm_matrix
from expanderlab.sampling import hermitian_modulus

SEED = 20260817

# Squared mean of the quarter-circle density, (8 / (3 pi))^2.
LIMIT = 0.7205061947899554


def test_limit_matches_closed_form():
    assert estimate_chi_limit() == pytest.approx(LIMIT, abs=1e-9)
    assert 0.7205 <= estimate_chi_limit() <= 0.7206


def test_quarter_circle_density_normalized():
    # Independent check that sqrt(4 - s^2)/pi integrates to 1 on [0, 2].
    mass, _ = scipy.integrate.quad(
        lambda s: np.sqrt(4.0 - s * s) / np.pi, 0.0, 2.0, epsabs=1e-12)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_entrywise_equals_trace_formula_per_sample():
    # Same algebraic statistic, so shared streams agree to round-off.
    stream = SeedStream(SEED).child(0)
    a = estimate_chi_entrywise(6, 50, stream)
    b = estimate_chi_trace_formula(6, 50, stream)
    assert a.chi_hat == pytest.approx(b.chi_hat, abs=1e-10)
    assert a.stderr == pytest.approx(b.stderr, abs=1e-10)


def test_methods_cross_check_n4():
    trials = 3000
    ent = estimate_chi_entrywise(4, trials, SeedStream(SEED).child(1))
    spec = estimate_chi_spectral(4, trials, SeedStream(SEED).child(2))
    sigma = np.hypot(ent.stderr, spec.stderr)
    assert abs(ent.chi_hat - spec.chi_hat) <= 3.0 * sigma


def test_methods_cross_check_n2():
    trials = 12000
    ent = estimate_chi_entrywise(2, trials, SeedStream(SEED).child(3))
    spec = estimate_chi_spectral(2, trials, SeedStream(SEED).child(4))
    sigma = np.hypot(ent.stderr, spec.stderr)
    assert abs(ent.chi_hat - spec.chi_hat) <= 3.0 * sigma


def test_mean_squared_diagonal_bounded():
    # E |Y|_jj^2 <= E tr(|Y|^2)/N = 1; allow 3 sigma of sampling noise.
    est = estimate_chi_trace_formula(8, 800, SeedStream(SEED).child(5))
    mean_sq = est.extras["mean_sq_diagonal"]
    stderr = est.extras["stderr_sq_diagonal"]
    assert mean_sq <= 1.0 + 3.0 * stderr


def test_chi_estimate_sane():
    est = estimate_chi_trace_formula(8, 400, SeedStream(SEED).child(6))
    assert 0.0 < est.chi_hat <= 1.0 + 3.0 * est.stderr
    assert est.stderr > 0.0
    assert est.method == "trace_formula"
    assert est.trials == 400


def test_chi_floor_across_dimensions():
    # chi_N stays well above the 0.45 floor on a dyadic grid.  The floor
    # is conservative: with these trial counts and seed 20260817 the
    # observed minimum over the grid is ~0.70 (at N=2), with stderr
    # under 0.012 everywhere.
    for N in (2, 4, 8, 16, 32, 64, 128):
        trials = 400 if N <= 16 else 100
        est = estimate_chi_trace_formula(N, trials, SeedStream(SEED).child(7, N))
        assert est.chi_hat - 3.0 * est.stderr >= 0.45, (N, est.chi_hat)


def test_chi_window_at_n16_and_up():
    for N in (16, 32):
        est = estimate_chi_trace_formula(N, 300, SeedStream(SEED).child(8, N))
        assert est.chi_hat + 3.0 * est.stderr >= LIMIT - 0.05
        assert est.chi_hat - 3.0 * est.stderr <= 1.0


def test_spectral_structure_residuals():
    est = estimate_chi_spectral(4, 2000, SeedStream(SEED).child(9))
    fluct = est.extras["fluctuation"]
    assert est.extras["structure_residual"] <= 5.0 * fluct
    assert est.extras["identity_residual"] <= 5.0 * fluct
    # Each sample sends vec(I) to vec(|Y|^2), so the overlap is 1 only
    # in expectation; hold it to the same batch fluctuation scale.
    assert abs(est.extras["projector_overlap"] - 1.0) <= 5.0 * fluct


def test_exact_channel_rotationally_invariant():
    # Oracle for the invariance the sampled check relies on: the model
    # P + chi (1 - P) commutes with every U tensor conj(U) exactly.
    N = 2
    d = N * N
    ident_flat = np.eye(N, dtype=complex).reshape(-1)
    p_mat = np.outer(ident_flat, ident_flat) / N
    model = p_mat + 0.63 * (np.eye(d) - p_mat)
    u = sample_haar_unitary(N, SeedStream(SEED).child(10))
    w = np.kron(u, u.conj())
    assert np.linalg.norm(w @ model @ w.conj().T - model) <= 1e-12
    # Conjugating by the identity changes nothing at all, bit for bit.
    eye = np.kron(np.eye(N), np.eye(N))
    assert np.array_equal(eye @ model @ eye.conj().T, model)


def test_rotational_invariance_check_passes():
    report = check_rotational_invariance(4, 600, SeedStream(SEED).child(11))
    assert report["passed"], report["ratios"]
    assert report["max_ratio"] == max(report["ratios"])
    assert len(report["ratios"]) == report["n_conjugations"] == 5


def test_rotational_invariance_fluctuation_shrinks():
    small = check_rotational_invariance(4, 300, SeedStream(SEED).child(12))
    large = check_rotational_invariance(4, 1200, SeedStream(SEED).child(12))
    # Quadrupling the trials should roughly halve the batch fluctuation,
    # and the conjugation change itself shrinks with it (the estimate
    # approaches the exactly invariant channel).
    assert large["fluctuation"] <= 0.75 * small["fluctuation"]
    small_change = max(small["ratios"]) * small["fluctuation"]
    large_change = max(large["ratios"]) * large["fluctuation"]
    assert large_change < small_change


def test_polar_factorization_check_passes():
    report = check_polar_factorization(4, [0.7, 0.3], 500, SeedStream(SEED).child(13))
    assert report["passed"], report
    assert report["n_terms"] == 2
    assert report["residual"] <= 5.0 * report["fluctuation"]


def test_polar_factorization_exact_per_sample():
    # The factorization Y (.) Y* = (U (.) U*)(|Y| (.) |Y|) holds sample
    # by sample, before any averaging.
    from expanderlab.sampling import polar_decompose
    y = sample_ginibre(3, SeedStream(SEED).child(14))
    u, m = polar_decompose(y)
    lhs = np.kron(y, y.conj())
    rhs = np.kron(u, u.conj()) @ np.kron(m, m.conj())
    assert np.linalg.norm(lhs - rhs) <= 1e-10


def test_trace_norm_proxy_near_limit_mean():
    # E tr|Y| / N approaches 8 / (3 pi) ~ 0.8488; at N = 200 the
    # per-sample spread is tiny, so a short run pins it down.
    N, trials = 200, 30
    stream = SeedStream(SEED).child(15)
    vals = [trace_norm_matrix(sample_ginibre(N, stream.child(t))) / N
            for t in range(trials)]
    b_hat = float(np.mean(vals))
    assert 0.84 <= b_hat <= 0.86, b_hat


def test_modulus_diagonal_mean_is_chi_sqrt_scale():
    # Diagonal entries of |Y| concentrate near the quarter-circle mean,
    # so their pairwise products estimate chi; spot-check the mean entry.
    N, trials = 16, 200
    stream = SeedStream(SEED).child(16)
    vals = np.empty(trials)
    for t in range(trials):
        d = np.diagonal(hermitian_modulus(sample_ginibre(N, stream.child(t)))).real
        vals[t] = d.mean()
    mean = vals.mean()
    stderr = vals.std(ddof=1) / np.sqrt(trials)
    assert abs(mean - 8.0 / (3.0 * np.pi)) <= max(3.0 * stderr, 0.02)


def test_argument_validation():
    stream = SeedStream(SEED).child(17)
    with pytest.raises(ValueError, match="N >= 2"):
        estimate_chi_entrywise(1, 10, stream)
    with pytest.raises(ValueError, match="trials"):
        estimate_chi_trace_formula(4, 1, stream)
    with pytest.raises(ValueError, match="coefficient"):
        check_polar_factorization(4, [], 10, stream)
    # The dense channel checks respect the densification cap (N^2 rows);
    # the scalar estimators have no such limit.
    for fn in (estimate_chi_spectral, check_rotational_invariance):
        with pytest.raises(ValueError, match="cap"):
            fn(65, 10, stream)
    with pytest.raises(ValueError, match="cap"):
        check_polar_factorization(65, [1.0], 10, stream)


def test_determinism_across_calls():
    a = estimate_chi_spectral(4, 200, SeedStream(SEED).child(18))
    b = estimate_chi_spectral(4, 200, SeedStream(SEED).child(18))
    assert a.chi_hat == b.chi_hat
    assert a.extras["structure_residual"] == b.extras["structure_residual"]
