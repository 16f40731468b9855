"""Sampler contracts: moments, unitarity, polar factors, determinism."""

import numpy as np
import pytest

from expanderlab.sampling import (
    RankDeficiencyError,
    SeedStream,
    hermitian_modulus,
    polar_decompose,
    sample_ginibre,
    sample_haar_unitary,
)

SEED = 20260814


def test_seed_stream_child_paths():
    root = SeedStream(SEED)
    assert root.path == ()
    assert root.child(3, 1).path == (3, 1)
    assert root.child(3).child(1) == root.child(3, 1)


def test_seed_stream_rejects_bad_input():
    with pytest.raises(TypeError):
        SeedStream("42")
    with pytest.raises(ValueError):
        SeedStream(1, (-1,))


def test_seed_stream_generator_is_fresh():
    s = SeedStream(SEED, (5,))
    a = s.generator().standard_normal(4)
    b = s.generator().standard_normal(4)
    assert np.array_equal(a, b)


def test_ginibre_determinism():
    s = SeedStream(SEED).child(0, 7)
    assert np.array_equal(sample_ginibre(6, s), sample_ginibre(6, s))


def test_ginibre_distinct_paths_differ():
    root = SeedStream(SEED)
    y0 = sample_ginibre(6, root.child(0))
    y1 = sample_ginibre(6, root.child(1))
    assert not np.array_equal(y0, y1)


def test_ginibre_rejects_bad_dimension():
    with pytest.raises(ValueError):
        sample_ginibre(0, SeedStream(SEED))


def test_ginibre_entry_variance_n1():
    # At N=1 the single entry has E|Y|^2 = 1, checked on 10^5 draws.
    rng = SeedStream(SEED).child(1).generator()
    g = rng.standard_normal(10 ** 5)
    gp = rng.standard_normal(10 ** 5)
    z = (g + 1j * gp) / np.sqrt(2.0)
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.02


def test_ginibre_trace_normalization():
    # E[(1/N) tr(Y* Y)] = 1, within 3 standard errors.
    N, trials = 8, 1000
    root = SeedStream(SEED).child(2)
    vals = np.empty(trials)
    for t in range(trials):
        y = sample_ginibre(N, root.child(t))
        vals[t] = np.trace(y.conj().T @ y).real / N
    stderr = vals.std(ddof=1) / np.sqrt(trials)
    assert abs(vals.mean() - 1.0) <= 3 * stderr


def test_ginibre_entry_second_moment():
    # Each entry has E|Y(i,j)|^2 = 1/N.
    N, trials = 4, 2000
    root = SeedStream(SEED).child(3)
    sq = np.zeros((N, N))
    for t in range(trials):
        sq += np.abs(sample_ginibre(N, root.child(t))) ** 2
    sq /= trials
    assert np.all(np.abs(sq - 1.0 / N) < 0.05 / N * 3)


def test_haar_unitarity():
    root = SeedStream(SEED).child(4)
    eye = np.eye(5)
    for t in range(100):
        u = sample_haar_unitary(5, root.child(t))
        assert np.linalg.norm(u @ u.conj().T - eye, ord=2) <= 1e-12


def test_haar_first_entry_second_moment():
    # Haar columns are uniform on the sphere, so E|U(1,1)|^2 = 1/N.
    N, trials = 10, 10 ** 4
    root = SeedStream(SEED).child(5)
    vals = np.empty(trials)
    for t in range(trials):
        vals[t] = abs(sample_haar_unitary(N, root.child(t))[0, 0]) ** 2
    assert abs(vals.mean() - 1.0 / N) < 0.005


def test_haar_trace_centering():
    N, trials = 6, 10 ** 4
    root = SeedStream(SEED).child(6)
    tr = np.empty(trials, dtype=complex)
    for t in range(trials):
        tr[t] = np.trace(sample_haar_unitary(N, root.child(t))) / N
    assert abs(tr.real.mean()) < 0.01
    assert abs(tr.imag.mean()) < 0.01


def test_haar_translation_invariance():
    # Fixed V: moments of (V U)(1,1) match those of U(1,1).
    N, trials = 4, 4000
    root = SeedStream(SEED).child(7)
    rng = SeedStream(SEED).child(8).generator()
    v, _ = np.linalg.qr(rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))
    a = np.empty(trials, dtype=complex)
    b = np.empty(trials, dtype=complex)
    for t in range(trials):
        u = sample_haar_unitary(N, root.child(t))
        a[t] = u[0, 0]
        b[t] = (v @ u)[0, 0]
    for x, y in [(a.real, b.real), (a.imag, b.imag),
                 (np.abs(a) ** 2, np.abs(b) ** 2)]:
        se = np.sqrt(x.var(ddof=1) / trials + y.var(ddof=1) / trials)
        assert abs(x.mean() - y.mean()) <= 3 * se


def test_polar_identity():
    u, m = polar_decompose(np.eye(3, dtype=complex))
    assert np.allclose(u, np.eye(3), atol=1e-14)
    assert np.allclose(m, np.eye(3), atol=1e-14)


def test_polar_real_diagonal():
    u, m = polar_decompose(np.diag([2.0, -3.0]).astype(complex))
    assert np.allclose(u, np.diag([1.0, -1.0]), atol=1e-12)
    assert np.allclose(m, np.diag([2.0, 3.0]), atol=1e-12)


def test_polar_reconstruction_and_svd_oracle():
    # Against the SVD construction U = W V*, |M| = V Sigma V*.
    y = sample_ginibre(16, SeedStream(SEED).child(9))
    u, m = polar_decompose(y)
    assert np.linalg.norm(u @ m - y) / np.linalg.norm(y) <= 1e-10
    w, sig, vh = np.linalg.svd(y)
    u_ref = w @ vh
    m_ref = vh.conj().T @ np.diag(sig) @ vh
    assert np.linalg.norm(u - u_ref) <= 1e-8
    assert np.linalg.norm(m - m_ref) <= 1e-8
    assert np.linalg.norm(u @ u.conj().T - np.eye(16)) <= 1e-10
    # Modulus is Hermitian PSD.
    assert np.linalg.norm(m - m.conj().T) <= 1e-12
    assert np.linalg.eigvalsh(m).min() >= -1e-12


def test_polar_rejects_singular():
    bad = np.diag([1.0, 0.0]).astype(complex)
    with pytest.raises(RankDeficiencyError) as exc:
        polar_decompose(bad)
    assert exc.value.ratio is not None
    assert "ratio" in str(exc.value)


def test_hermitian_modulus_accepts_singular():
    m = hermitian_modulus(np.diag([1.0, 0.0]).astype(complex))
    assert np.allclose(m, np.diag([1.0, 0.0]), atol=1e-12)


def test_hermitian_modulus_matches_polar():
    y = sample_ginibre(8, SeedStream(SEED).child(10))
    _, m = polar_decompose(y)
    assert np.allclose(hermitian_modulus(y), m, atol=1e-12)


def test_polar_factor_independence():
    # Sample correlation between Re tr(U) and tr|Y| vanishes within 3 se.
    N, trials = 8, 10 ** 4
    root = SeedStream(SEED).child(11)
    a = np.empty(trials)
    b = np.empty(trials)
    for t in range(trials):
        y = sample_ginibre(N, root.child(t))
        u, m = polar_decompose(y)
        a[t] = np.trace(u).real
        b[t] = np.trace(m).real
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) <= 3.0 / np.sqrt(trials)
