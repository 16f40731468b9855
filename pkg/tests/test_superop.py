"""Tensor-sum operator semantics: apply, adjoint, densify, serialization."""

import numpy as np
import pytest

from expanderlab.sampling import SeedStream, sample_ginibre, sample_haar_unitary
from expanderlab.superop import (
    TensorSumOperator,
    apply,
    apply_adjoint,
    apply_adjoint_block,
    apply_block,
    build_double_sum_operator,
    build_gaussian_operator,
    build_uu_operator,
    densify,
    factor_spec,
    from_descriptor,
    hs_inner,
    project_traceless,
    to_descriptor,
)

SEED = 20260815


def rand_xi(rng, N):
    return rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))


def rand_op(rng, N, n, traceless=False):
    lefts = [rand_xi(rng, N) for _ in range(n)]
    rights = [rand_xi(rng, N) for _ in range(n)]
    coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return TensorSumOperator(N, lefts, rights, coeffs, traceless=traceless)


def test_identity_term_is_identity_map():
    eye = np.eye(3, dtype=complex)
    op = TensorSumOperator(3, [eye], [eye], [1.0])
    rng = SeedStream(SEED).child(0).generator()
    xi = rand_xi(rng, 3)
    assert np.allclose(apply(op, xi), xi, atol=1e-14)


def test_traceless_kills_identity_input():
    rng = SeedStream(SEED).child(1).generator()
    op = rand_op(rng, 3, 2, traceless=True)
    out = apply(op, np.eye(3))
    assert np.linalg.norm(out) <= 1e-12


def test_swap_conjugation():
    # sigma e11 sigma* = e22 for the 2x2 basis swap.
    sigma = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    op = TensorSumOperator(2, [sigma], [sigma], [1.0])
    e11 = np.zeros((2, 2), dtype=complex)
    e11[0, 0] = 1.0
    out = apply(op, e11)
    expect = np.zeros((2, 2), dtype=complex)
    expect[1, 1] = 1.0
    assert np.allclose(out, expect, atol=1e-14)


def test_project_traceless_basic():
    assert np.linalg.norm(project_traceless(np.eye(4))) <= 1e-14
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    assert np.allclose(project_traceless(e11), np.diag([0.5, -0.5]), atol=1e-14)
    # Traceless input passes through unchanged.
    xi = np.diag([1.0, -1.0]).astype(complex)
    assert np.allclose(project_traceless(xi), xi, atol=1e-14)


def test_project_traceless_idempotent_self_adjoint():
    rng = SeedStream(SEED).child(2).generator()
    xi = rand_xi(rng, 4)
    eta = rand_xi(rng, 4)
    once = project_traceless(xi)
    assert np.allclose(project_traceless(once), once, atol=1e-12)
    lhs = hs_inner(project_traceless(xi), eta)
    rhs = hs_inner(xi, project_traceless(eta))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_apply_linearity():
    rng = SeedStream(SEED).child(3).generator()
    op = rand_op(rng, 4, 3, traceless=True)
    xi, eta = rand_xi(rng, 4), rand_xi(rng, 4)
    alpha = 0.7 - 1.3j
    lhs = apply(op, alpha * xi + eta)
    rhs = alpha * apply(op, xi) + apply(op, eta)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_coefficient_scaling():
    rng = SeedStream(SEED).child(4).generator()
    lefts = [rand_xi(rng, 3) for _ in range(2)]
    rights = [rand_xi(rng, 3) for _ in range(2)]
    xi = rand_xi(rng, 3)
    a = np.array([1.0 + 0.5j, -0.25])
    lam = 2.5
    base = TensorSumOperator(3, lefts, rights, a)
    scaled = TensorSumOperator(3, lefts, rights, lam * a)
    assert np.allclose(apply(scaled, xi), lam * apply(base, xi), atol=1e-12)


def test_adjoint_pairing():
    rng = SeedStream(SEED).child(5).generator()
    for traceless in (False, True):
        op = rand_op(rng, 4, 3, traceless=traceless)
        xi, eta = rand_xi(rng, 4), rand_xi(rng, 4)
        lhs = hs_inner(apply(op, xi), eta)
        rhs = hs_inner(xi, apply_adjoint(op, eta))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_adjoint_of_identity_term_is_apply():
    eye = np.eye(3, dtype=complex)
    op = TensorSumOperator(3, [eye], [eye], [1.0])
    rng = SeedStream(SEED).child(6).generator()
    xi = rand_xi(rng, 3)
    assert np.allclose(apply_adjoint(op, xi), apply(op, xi), atol=1e-14)


def test_adjoint_output_traceless_when_flagged():
    rng = SeedStream(SEED).child(7).generator()
    op = rand_op(rng, 4, 2, traceless=True)
    out = apply_adjoint(op, np.eye(4))
    assert abs(np.trace(out)) <= 1e-12


def test_densify_identity_term():
    eye = np.eye(2, dtype=complex)
    op = TensorSumOperator(2, [eye], [eye], [1.0])
    assert np.allclose(densify(op), np.eye(4), atol=1e-14)


def test_densify_entry_formula():
    # Single term: M[(i,l),(j,m)] = x(i,j) conj(y(l,m)).
    rng = SeedStream(SEED).child(8).generator()
    N = 2
    x, y = rand_xi(rng, N), rand_xi(rng, N)
    mat = densify(TensorSumOperator(N, [x], [y], [1.0]))
    for i in range(N):
        for l in range(N):
            for j in range(N):
                for m in range(N):
                    assert mat[i * N + l, j * N + m] == pytest.approx(
                        x[i, j] * np.conj(y[l, m]), abs=1e-14)


def test_densify_matches_apply():
    rng = SeedStream(SEED).child(9).generator()
    for traceless in (False, True):
        op = rand_op(rng, 3, 2, traceless=traceless)
        mat = densify(op)
        for _ in range(10):
            xi = rand_xi(rng, 3)
            via_mat = (mat @ xi.reshape(-1)).reshape(3, 3)
            direct = apply(op, xi)
            assert np.linalg.norm(via_mat - direct) <= 1e-12 * np.linalg.norm(direct)


def test_densify_cap():
    eye = np.eye(70, dtype=complex)
    op = TensorSumOperator(70, [eye], [eye], [1.0])
    with pytest.raises(ValueError, match="cap"):
        densify(op)


def test_dimension_mismatch_messages():
    eye = np.eye(3, dtype=complex)
    with pytest.raises(ValueError, match="shape"):
        TensorSumOperator(3, [np.eye(2)], [eye], [1.0])
    op = TensorSumOperator(3, [eye], [eye], [1.0])
    with pytest.raises(ValueError, match="3"):
        apply(op, np.eye(4))
    with pytest.raises(ValueError):
        TensorSumOperator(3, [eye, eye], [eye], [1.0, 2.0])
    with pytest.raises(ValueError):
        TensorSumOperator(3, [eye], [eye], [1.0, 2.0])


def test_build_uu_isometry_norm():
    u = sample_haar_unitary(4, SeedStream(SEED).child(10))
    op = build_uu_operator([1.0], [u], traceless=True)
    sig = np.linalg.svd(densify(op), compute_uv=False)
    assert abs(sig[0] - 1.0) <= 1e-12


def test_build_gaussian_zero_coeffs():
    root = SeedStream(SEED).child(11)
    ys = [sample_ginibre(3, root.child(j)) for j in range(2)]
    op = build_gaussian_operator([0.0, 0.0], ys, ys, traceless=False)
    assert np.linalg.norm(densify(op)) == 0.0


def test_build_uu_annihilates_identity_vec():
    root = SeedStream(SEED).child(12)
    us = [sample_haar_unitary(3, root.child(j)) for j in range(2)]
    op = build_uu_operator([1.0, 1.0], us, traceless=True)
    out = densify(op) @ np.eye(3, dtype=complex).reshape(-1)
    assert np.linalg.norm(out) <= 1e-12


def test_empty_sum_is_zero():
    op = build_uu_operator([], [], traceless=False, dim=3)
    assert op.n_terms == 0
    assert np.linalg.norm(apply(op, np.eye(3))) == 0.0
    assert np.linalg.norm(densify(op)) == 0.0


def test_double_sum_diagonal_reduces_to_single():
    root = SeedStream(SEED).child(13)
    us = [sample_haar_unitary(3, root.child(j)) for j in range(2)]
    double = build_double_sum_operator(np.eye(2), us, traceless=True)
    single = build_uu_operator([1.0, 1.0], us, traceless=True)
    assert np.allclose(densify(double), densify(single), atol=1e-14)


def test_double_sum_zero_array():
    root = SeedStream(SEED).child(14)
    us = [sample_haar_unitary(3, root.child(j)) for j in range(2)]
    op = build_double_sum_operator(np.zeros((2, 2)), us)
    assert op.n_terms == 0
    assert np.linalg.norm(densify(op)) == 0.0


def test_double_sum_linearity_oracle():
    rng = SeedStream(SEED).child(15).generator()
    N, n = 2, 2
    fs = [rand_xi(rng, N) for _ in range(n)]
    gs = [rand_xi(rng, N) for _ in range(n)]
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    op = build_double_sum_operator(a, fs, gs)
    expect = sum(a[i, j] * np.kron(fs[i], gs[j].conj())
                 for i in range(n) for j in range(n))
    assert np.allclose(densify(op), expect, atol=1e-12)


def test_double_sum_shape_mismatch():
    root = SeedStream(SEED).child(16)
    us = [sample_haar_unitary(3, root.child(j)) for j in range(2)]
    with pytest.raises(ValueError):
        build_double_sum_operator(np.zeros((3, 3)), us)
    with pytest.raises(ValueError):
        build_double_sum_operator(np.zeros((2, 3)), us)


def test_block_mode_matches_densify():
    rng = SeedStream(SEED).child(17).generator()
    N, n, k = 3, 2, 2
    lefts = [rand_xi(rng, N) for _ in range(n)]
    rights = [rand_xi(rng, N) for _ in range(n)]
    blocks = [rand_xi(rng, k) for _ in range(n)]
    for traceless in (False, True):
        op = TensorSumOperator(N, lefts, rights, blocks, traceless=traceless,
                               block_dim=k)
        mat = densify(op)
        Xi = rand_xi(rng, N)[None] * np.ones((k, 1, 1)) + np.stack(
            [rand_xi(rng, N) for _ in range(k)])
        via_mat = (mat @ Xi.reshape(-1)).reshape(k, N, N)
        direct = apply_block(op, Xi)
        assert np.linalg.norm(via_mat - direct) <= 1e-12 * np.linalg.norm(direct)


def test_block_adjoint_pairing():
    rng = SeedStream(SEED).child(18).generator()
    N, n, k = 3, 2, 2
    op = TensorSumOperator(
        N, [rand_xi(rng, N) for _ in range(n)], [rand_xi(rng, N) for _ in range(n)],
        [rand_xi(rng, k) for _ in range(n)], traceless=True, block_dim=k)
    Xi = np.stack([rand_xi(rng, N) for _ in range(k)])
    Eta = np.stack([rand_xi(rng, N) for _ in range(k)])
    lhs = np.vdot(Eta, apply_block(op, Xi))
    rhs = np.vdot(apply_adjoint_block(op, Eta), Xi)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_block_k1_equals_scalar():
    rng = SeedStream(SEED).child(19).generator()
    N = 3
    lefts = [rand_xi(rng, N)]
    rights = [rand_xi(rng, N)]
    a = 0.8 - 0.3j
    block = TensorSumOperator(N, lefts, rights, [np.array([[a]])], block_dim=1)
    scalar = TensorSumOperator(N, lefts, rights, [a])
    assert np.allclose(densify(block), densify(scalar), atol=1e-14)


def test_scalar_block_mode_mixups_raise():
    rng = SeedStream(SEED).child(20).generator()
    scalar = rand_op(rng, 3, 1)
    with pytest.raises(ValueError, match="scalar-coefficient"):
        apply_block(scalar, np.zeros((1, 3, 3)))
    block = TensorSumOperator(3, [np.eye(3)], [np.eye(3)], [np.eye(2)], block_dim=2)
    with pytest.raises(ValueError, match="apply_block"):
        apply(block, np.eye(3))


def test_hs_isometry_of_unitary_conjugation():
    u = sample_haar_unitary(5, SeedStream(SEED).child(21))
    rng = SeedStream(SEED).child(22).generator()
    xi = rand_xi(rng, 5)
    assert abs(np.linalg.norm(u @ xi @ u.conj().T) - np.linalg.norm(xi)) <= 1e-12


def test_descriptor_round_trip():
    master = SEED + 1
    n, N = 2, 4
    prov = {
        "left": [factor_spec("haar", master, (N, 0, j, 0)) for j in range(n)],
        "right": [factor_spec("haar", master, (N, 0, j, 0)) for j in range(n)],
    }
    root = SeedStream(master)
    us = [sample_haar_unitary(N, root.child(N, 0, j, 0)) for j in range(n)]
    op = build_uu_operator([0.5, -0.5j], us, traceless=True, provenance=prov)
    desc = to_descriptor(op)
    import json
    rebuilt = from_descriptor(json.loads(json.dumps(desc)))
    assert rebuilt.dim == op.dim
    assert rebuilt.traceless == op.traceless
    assert np.array_equal(rebuilt.coeffs, op.coeffs)
    assert np.array_equal(rebuilt.lefts, op.lefts)
    assert np.allclose(densify(rebuilt), densify(op), atol=0.0)


def test_descriptor_requires_provenance():
    op = build_uu_operator([1.0], [np.eye(3, dtype=complex)], traceless=False)
    with pytest.raises(ValueError, match="provenance"):
        to_descriptor(op)
