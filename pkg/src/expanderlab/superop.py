"""Tensor-sum superoperators on Hilbert-Schmidt space.

An operator here is a finite sum ``S(xi) = sum_j a_j x_j xi y_j*`` acting
on N x N matrices, optionally pre-composed with the traceless projection
``xi -> xi - (tr xi / N) I`` and optionally carrying k x k matrix
coefficients, in which case it acts on k-stacks of N x N slices.

The module offers a matrix-free ``apply`` (used by power iteration at
large N) and an exact ``densify`` (the small-N oracle).  The vec
convention is row-major throughout: ``vec(xi) = xi.reshape(-1)`` in C
order, under which a single scalar term densifies to
``a * kron(x, conj(y))``.
"""

from __future__ import annotations

import numpy as np

from .sampling import SeedStream, sample_ginibre, sample_haar_unitary

__all__ = [
    "DENSIFY_CAP",
    "TensorSumOperator",
    "apply",
    "apply_adjoint",
    "apply_adjoint_block",
    "apply_block",
    "build_double_sum_operator",
    "build_gaussian_operator",
    "build_uu_operator",
    "densify",
    "from_descriptor",
    "hs_inner",
    "project_traceless",
    "to_descriptor",
]

# Default row cap for densification; beyond it the matrix-free path applies.
DENSIFY_CAP = 4096


def hs_inner(xi, eta):
    """Hilbert-Schmidt inner product ``tr(eta* xi)``, conjugate-linear in eta."""
    return complex(np.vdot(eta, xi))


def project_traceless(xi):
    """Remove the identity component: ``xi - (tr(xi)/N) I``.

    The output has trace 0 up to round-off (bounded by ``1e-12 N ||xi||_F``).
    """
    xi = np.asarray(xi)
    if xi.ndim != 2 or xi.shape[0] != xi.shape[1]:
        raise ValueError(f"traceless projection needs a square matrix, got shape {xi.shape}")
    n = xi.shape[0]
    out = xi.astype(complex, copy=True)
    shift = np.trace(xi) / n
    out[np.diag_indices(n)] -= shift
    return out


def _as_factor(m, dim, what):
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        raise ValueError(f"{what} has shape {m.shape}, expected ({dim}, {dim})")
    return m


class TensorSumOperator:
    """Immutable tensor sum ``sum_j a_j x_j (.) y_j*`` on S2^N.

    Parameters
    ----------
    dim : int
        Side length N of the matrices the operator acts on.
    lefts, rights : sequences of (N, N) arrays
        Factors ``x_j`` and ``y_j``; equal length n (possibly zero).
    coeffs : sequence
        Either n complex scalars, or n arrays of shape (k, k) for the
        matrix-coefficient mode (pass ``block_dim=k``).
    traceless : bool
        If set, inputs are projected onto traceless matrices before the
        sum is applied.
    block_dim : int or None
        None selects scalar mode; a positive k selects matrix mode.
    provenance : dict or None
        Optional record of how the factors were sampled (seed paths);
        required only for serialization, see :func:`to_descriptor`.
    """

    __slots__ = ("dim", "n_terms", "traceless", "block_dim", "coeffs",
                 "_L", "_R", "_Ldag", "_Rdag", "provenance")

    def __init__(self, dim, lefts, rights, coeffs, traceless=False,
                 block_dim=None, provenance=None):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"operator dimension must be positive, got {dim}")
        lefts = [_as_factor(m, dim, f"left factor {i}") for i, m in enumerate(lefts)]
        rights = [_as_factor(m, dim, f"right factor {i}") for i, m in enumerate(rights)]
        if len(lefts) != len(rights):
            raise ValueError(f"{len(lefts)} left factors vs {len(rights)} right factors")
        n = len(lefts)
        if len(coeffs) != n:
            raise ValueError(f"{len(coeffs)} coefficients for {n} terms")
        if block_dim is None:
            cs = np.asarray(list(coeffs), dtype=complex).reshape(n)
        else:
            k = int(block_dim)
            if k < 1:
                raise ValueError(f"block_dim must be positive, got {block_dim}")
            cs = np.empty((n, k, k), dtype=complex)
            for i, c in enumerate(coeffs):
                c = np.asarray(c, dtype=complex)
                if c.shape != (k, k):
                    raise ValueError(f"coefficient block {i} has shape {c.shape}, expected ({k}, {k})")
                cs[i] = c
            block_dim = k
        shape = (n, dim, dim)
        L = np.array(lefts, dtype=complex).reshape(shape)
        R = np.array(rights, dtype=complex).reshape(shape)
        for arr in (L, R, cs):
            arr.setflags(write=False)
        self.dim = dim
        self.n_terms = n
        self.traceless = bool(traceless)
        self.block_dim = block_dim
        self.coeffs = cs
        self._L = L
        self._R = R
        self._Ldag = np.ascontiguousarray(L.conj().transpose(0, 2, 1))
        self._Rdag = np.ascontiguousarray(R.conj().transpose(0, 2, 1))
        self._Ldag.setflags(write=False)
        self._Rdag.setflags(write=False)
        self.provenance = provenance

    @property
    def lefts(self):
        return self._L

    @property
    def rights(self):
        return self._R

    def vec_dim(self):
        """Length of the flattened vector the densified matrix acts on."""
        k = 1 if self.block_dim is None else self.block_dim
        return self.dim * self.dim * k

    def __repr__(self):
        mode = "scalar" if self.block_dim is None else f"block k={self.block_dim}"
        return (f"TensorSumOperator(dim={self.dim}, n_terms={self.n_terms}, "
                f"{mode}, traceless={self.traceless})")


def _check_input(S, xi):
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (S.dim, S.dim):
        raise ValueError(f"operator expects input of shape ({S.dim}, {S.dim}), got {xi.shape}")
    return xi


def apply(S, xi):
    """Evaluate ``S(xi)`` for a scalar-coefficient operator.

    With the traceless flag the projection hits ``xi`` first, matching the
    convention that ``(1 - P)`` stands to the right of the tensor sum.
    """
    if S.block_dim is not None:
        raise ValueError("matrix-coefficient operator: use apply_block")
    xi = _check_input(S, xi)
    if S.traceless:
        xi = project_traceless(xi)
    if S.n_terms == 0:
        return np.zeros((S.dim, S.dim), dtype=complex)
    prods = S._L @ xi @ S._Rdag
    return np.tensordot(S.coeffs, prods, axes=([0], [0]))


def apply_adjoint(S, xi):
    """Evaluate the Hilbert-Schmidt adjoint ``S*(xi)``.

    The adjoint of ``a_j x_j (.) y_j*`` is ``conj(a_j) x_j* (.) y_j``; a
    traceless pre-projection on S turns into a post-projection here.
    """
    if S.block_dim is not None:
        raise ValueError("matrix-coefficient operator: use apply_adjoint_block")
    xi = _check_input(S, xi)
    if S.n_terms == 0:
        out = np.zeros((S.dim, S.dim), dtype=complex)
    else:
        prods = S._Ldag @ xi @ S._R
        out = np.tensordot(S.coeffs.conj(), prods, axes=([0], [0]))
    if S.traceless:
        out = project_traceless(out)
    return out


def _check_block_input(S, Xi):
    if S.block_dim is None:
        raise ValueError("scalar-coefficient operator: use apply / apply_adjoint")
    Xi = np.asarray(Xi, dtype=complex)
    if Xi.shape != (S.block_dim, S.dim, S.dim):
        raise ValueError(
            f"operator expects a stack of shape ({S.block_dim}, {S.dim}, {S.dim}), got {Xi.shape}")
    return Xi


def apply_block(S, Xi):
    """Evaluate the matrix-coefficient action on a k-stack of N x N slices.

    Slice u of the output is ``sum_j x_j (sum_v a_j[u, v] Xi[v]) y_j*``;
    the traceless projection, when set, acts slice by slice on the input.
    """
    Xi = _check_block_input(S, Xi)
    if S.traceless:
        Xi = Xi - (np.trace(Xi, axis1=1, axis2=2) / S.dim)[:, None, None] * np.eye(S.dim)
    out = np.zeros_like(Xi)
    for j in range(S.n_terms):
        mixed = np.tensordot(S.coeffs[j], Xi, axes=([1], [0]))
        out += S._L[j] @ mixed @ S._Rdag[j]
    return out


def apply_adjoint_block(S, Xi):
    """Adjoint of :func:`apply_block`; projection acts after the sum."""
    Xi = _check_block_input(S, Xi)
    out = np.zeros_like(Xi)
    for j in range(S.n_terms):
        mixed = np.tensordot(S.coeffs[j].conj().T, Xi, axes=([1], [0]))
        out += S._Ldag[j] @ mixed @ S._R[j]
    if S.traceless:
        out = out - (np.trace(out, axis1=1, axis2=2) / S.dim)[:, None, None] * np.eye(S.dim)
    return out


def densify(S, cap=DENSIFY_CAP):
    """Exact dense matrix of ``S`` under the row-major vec convention.

    A scalar term densifies to ``a_j kron(x_j, conj(y_j))`` and a matrix
    term to ``kron(a_j, kron(x_j, conj(y_j)))``; the traceless projection
    contributes a right factor ``I - vv*/N`` with ``v = vec(I)``.

    Raises a size error when the vector dimension exceeds ``cap``
    (default 4096 rows); use the matrix-free apply path instead.
    """
    d = S.vec_dim()
    if d > cap:
        raise ValueError(
            f"densification is {d} x {d} but the cap is {cap}; "
            f"use the matrix-free apply path for operators this large")
    N = S.dim
    M = np.zeros((d, d), dtype=complex)
    for j in range(S.n_terms):
        term = np.kron(S._L[j], S._R[j].conj())
        if S.block_dim is None:
            M += S.coeffs[j] * term
        else:
            M += np.kron(S.coeffs[j], term)
    if S.traceless:
        v = np.eye(N, dtype=complex).reshape(-1)
        proj = np.eye(N * N, dtype=complex) - np.outer(v, v) / N
        if S.block_dim is not None:
            proj = np.kron(np.eye(S.block_dim, dtype=complex), proj)
        M = M @ proj
    return M


def build_uu_operator(coeffs, unitaries, traceless, block_dim=None, dim=None,
                      provenance=None):
    """Tensor sum with matching factors, ``sum_j a_j U_j (.) U_j*``.

    ``coeffs`` may be scalars or k x k blocks (set ``block_dim``); pass
    ``dim`` when the factor list is empty.
    """
    unitaries = list(unitaries)
    if len(unitaries) == 0 and dim is None:
        raise ValueError("cannot infer dimension from an empty factor list; pass dim=")
    N = unitaries[0].shape[0] if unitaries else dim
    return TensorSumOperator(N, unitaries, unitaries, coeffs, traceless=traceless,
                             block_dim=block_dim, provenance=provenance)


def build_gaussian_operator(coeffs, lefts, rights, traceless, block_dim=None,
                            dim=None, provenance=None):
    """Tensor sum with independent factor families, ``sum_j a_j Y_j (.) Y'_j*``."""
    lefts, rights = list(lefts), list(rights)
    if len(lefts) == 0 and dim is None:
        raise ValueError("cannot infer dimension from an empty factor list; pass dim=")
    N = lefts[0].shape[0] if lefts else dim
    return TensorSumOperator(N, lefts, rights, coeffs, traceless=traceless,
                             block_dim=block_dim, provenance=provenance)


def build_double_sum_operator(coeff_matrix, lefts, rights=None, traceless=False,
                              provenance=None):
    """Double sum ``sum_{ij} a_ij f_i (.) g_j*`` from an n x n coefficient array.

    ``rights=None`` reuses ``lefts`` on both sides (the matching-unitary
    case).  Terms with an exactly zero coefficient are dropped, which
    leaves the operator unchanged but keeps the term count near n rather
    than n^2 for sparse coefficient arrays.
    """
    a = np.asarray(coeff_matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"coefficient array must be square, got shape {a.shape}")
    lefts = list(lefts)
    if rights is None:
        rights = lefts
    else:
        rights = list(rights)
    n = a.shape[0]
    if len(lefts) != n or len(rights) != n:
        raise ValueError(
            f"coefficient array is {n} x {n} but factor lists have lengths "
            f"{len(lefts)} and {len(rights)}")
    if n == 0:
        raise ValueError("empty double sum; build a zero operator directly")
    N = lefts[0].shape[0]
    term_lefts, term_rights, term_coeffs = [], [], []
    for i in range(n):
        for j in range(n):
            if a[i, j] != 0:
                term_lefts.append(lefts[i])
                term_rights.append(rights[j])
                term_coeffs.append(a[i, j])
    return TensorSumOperator(N, term_lefts, term_rights, term_coeffs,
                             traceless=traceless, provenance=provenance)


# ---------------------------------------------------------------------------
# JSON descriptors: factors are recorded as seed paths and re-derived on
# load, never written out as raw matrices.

_ENSEMBLES = {"haar": sample_haar_unitary, "ginibre": sample_ginibre}


def factor_spec(ensemble, master_seed, path):
    """Provenance record for one sampled factor."""
    if ensemble not in _ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {sorted(_ENSEMBLES)}")
    return {"ensemble": ensemble, "master_seed": int(master_seed),
            "path": [int(p) for p in path]}


def _complex_pairs(arr):
    a = np.asarray(arr, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _from_pairs(data):
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def to_descriptor(S):
    """JSON-ready descriptor of ``S`` with factors given by provenance.

    Requires ``S.provenance`` to hold ``{"left": [spec...], "right":
    [spec...]}`` with one :func:`factor_spec` per term; raises otherwise.
    """
    prov = S.provenance
    if not prov or "left" not in prov or "right" not in prov:
        raise ValueError("operator has no factor provenance; descriptors never store raw matrices")
    if len(prov["left"]) != S.n_terms or len(prov["right"]) != S.n_terms:
        raise ValueError("provenance length does not match term count")
    return {
        "dim": S.dim,
        "block_dim": S.block_dim,
        "traceless": S.traceless,
        "coeffs": _complex_pairs(S.coeffs),
        "factors": {"left": list(prov["left"]), "right": list(prov["right"])},
    }


def from_descriptor(desc):
    """Rebuild the operator described by :func:`to_descriptor` output.

    Factors are re-sampled from their recorded seed paths, so the result
    is bit-identical to the operator that was serialized.
    """
    N = int(desc["dim"])
    block_dim = desc.get("block_dim")
    coeffs = _from_pairs(desc["coeffs"])
    if block_dim is None:
        coeffs = list(coeffs.reshape(-1))
    else:
        coeffs = list(coeffs.reshape(-1, int(block_dim), int(block_dim)))

    def derive(spec):
        sampler = _ENSEMBLES[spec["ensemble"]]
        return sampler(N, SeedStream(int(spec["master_seed"]), tuple(spec["path"])))

    lefts = [derive(s) for s in desc["factors"]["left"]]
    rights = [derive(s) for s in desc["factors"]["right"]]
    return TensorSumOperator(N, lefts, rights, coeffs,
                             traceless=bool(desc["traceless"]),
                             block_dim=block_dim,
                             provenance={"left": list(desc["factors"]["left"]),
                                         "right": list(desc["factors"]["right"])})
