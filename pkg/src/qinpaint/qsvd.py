"""Singular value decomposition of quaternion matrices.

Everything runs through the complex adjoint embedding
``chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]`` of A = A1 + A2*j. The embedding
is a *-algebra homomorphism, so the singular values of chi(A) are those of A,
each repeated twice, and each pair of complex singular vectors collapses to a
single quaternion direction. This reuses the mature complex LAPACK kernels and
is far cheaper than the 4x real embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quatmat import TOLERANCES, QMatrix, conj_planes, hamilton

__all__ = [
    "NumericalError",
    "QSvdResult",
    "complex_adjoint",
    "from_complex_adjoint",
    "singular_values",
    "qsvd",
    "low_rank_approx",
    "numerical_rank",
    "cumulative_energy",
    "spread_rank_index",
]


class NumericalError(RuntimeError):
    """A dense kernel produced an inconsistent result (mispaired spectrum, divergence)."""


def complex_adjoint(A):
    """The (2*n1, 2*n2) complex embedding of a quaternion matrix."""
    a1, a2 = A.to_complex_pair()
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def from_complex_adjoint(M):
    """Inverse of :func:`complex_adjoint`, symmetrizing away rounding noise."""
    n1, n2 = M.shape[0] // 2, M.shape[1] // 2
    a1 = 0.5 * (M[:n1, :n2] + M[n1:, n2:].conj())
    a2 = 0.5 * (M[:n1, n2:] - M[n1:, :n2].conj())
    return QMatrix.from_complex_pair(a1, a2)


def _dedup_paired(values, pairing_tol):
    """Collapse the doubled spectrum of the embedding to single values."""
    even, odd = values[0::2], values[1::2]
    scale = float(values[0]) if values.size else 0.0
    if scale > 0 and float(np.max(even - odd)) > pairing_tol * scale:
        raise NumericalError("singular values of the complex embedding do not pair up")
    return even.copy()


def singular_values(A, pairing_tol=None):
    """Descending singular values of A (length min(n1, n2))."""
    if pairing_tol is None:
        pairing_tol = TOLERANCES.svd_pairing
    sc = np.linalg.svd(complex_adjoint(A), compute_uv=False)
    return _dedup_paired(sc, pairing_tol)


@dataclass(frozen=True)
class QSvdResult:
    """Factors A = U @ diag(s) @ V.H with unitary quaternion U (n1 x n1) and V (n2 x n2)."""

    U: QMatrix
    s: np.ndarray
    V: QMatrix

    def reconstruct(self):
        m = len(self.s)
        return (self.U[:, :m] * self.s) @ self.V[:, :m].H


# -- lifting complex singular vectors back to quaternion columns -------------


def _lift_column(col, n):
    """Quaternion vector whose first embedding column equals ``col``."""
    v1 = col[:n]
    v2 = -col[n:].conj()
    return np.stack([v1.real, v1.imag, v2.real, v2.imag])


def _project_out(basis, v):
    """Remove the components of v along the collected orthonormal columns."""
    if basis.shape[2] == 0:
        return v
    # quaternion inner products <q_t, v> = sum_l conj(q_l) * v_l, all t at once
    coeffs = hamilton(conj_planes(basis), v[:, :, None]).sum(axis=1)  # (4, t)
    return v - hamilton(basis, coeffs[:, None, :]).sum(axis=2)


def _greedy_lift(columns, n, count, out=None, have=0):
    """Collect ``count`` orthonormal quaternion columns from complex candidates.

    Within a degenerate singular subspace the complex SVD may return the
    symplectic partner of an already-lifted column, which lifts to the same
    quaternion direction; those candidates project to ~0 and are skipped.
    """
    if out is None:
        out = np.zeros((4, n, count))
    for col in columns.T:
        if have == count:
            break
        v = _project_out(out[:, :, :have], _lift_column(col, n))
        nrm = float(np.sqrt((v ** 2).sum()))
        if nrm > 1e-6:
            out[:, :, have] = v / nrm
            have += 1
    if have < count:
        # canonical completion; only reachable through severe cancellation
        for t in range(n):
            if have == count:
                break
            e = np.zeros((4, n))
            e[0, t] = 1.0
            v = _project_out(out[:, :, :have], e)
            nrm = float(np.sqrt((v ** 2).sum()))
            if nrm > 1e-6:
                out[:, :, have] = v / nrm
                have += 1
    if have < count:
        raise NumericalError("failed to assemble a unitary quaternion factor")
    return out


def qsvd(A, pairing_tol=None):
    """Full quaternion SVD.

    The right factor is lifted column by column from the embedding's singular
    vectors and re-orthonormalized by modified Gram-Schmidt under the
    quaternion inner product; the left factor is rebuilt as A @ v / sigma so
    the triplets stay consistently paired, then completed to a unitary basis.
    """
    if pairing_tol is None:
        pairing_tol = TOLERANCES.svd_pairing
    n1, n2 = A.shape
    m = min(n1, n2)
    Uc, sc, Vch = np.linalg.svd(complex_adjoint(A), full_matrices=True)
    s = _dedup_paired(sc, pairing_tol)

    V = QMatrix(_greedy_lift(Vch.conj().T, n2, n2), copy=False)

    U = np.zeros((4, n1, n1))
    cutoff = s[0] * 1e-12 if s.size and s[0] > 0 else 0.0
    k = int(np.searchsorted(-s, -cutoff))  # number of values strictly above cutoff
    if k:
        AV = (A @ V[:, :k]).planes / s[:k]
        U[:, :, :k] = AV
        # light re-orthonormalization guards near-degenerate clusters
        for t in range(k):
            v = _project_out(U[:, :, :t], U[:, :, t])
            U[:, :, t] = v / float(np.sqrt((v ** 2).sum()))
    _greedy_lift(Uc, n1, n1, out=U, have=k)
    return QSvdResult(QMatrix(U, copy=False), s, V)


def low_rank_approx(A, tau):
    """Keep only the singular triplets with sigma > tau (hard truncation)."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    chi = complex_adjoint(A)
    Uc, sc, Vch = np.linalg.svd(chi, full_matrices=False)
    pair_means = 0.5 * (sc[0::2] + sc[1::2])
    keep = np.repeat(pair_means > tau, 2)
    M = (Uc[:, keep] * sc[keep]) @ Vch[keep]
    return from_complex_adjoint(M)


def numerical_rank(A, delta):
    """Number of singular values strictly bigger than delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return int(np.count_nonzero(singular_values(A) > delta))


def cumulative_energy(A):
    """Running energy ratios cumsum(sigma^2) / sum(sigma^2), ending at 1."""
    s = singular_values(A)
    acc = np.cumsum(s ** 2)
    if acc[-1] == 0:
        raise ValueError("zero matrix has no spectral energy")
    return acc / acc[-1]


def spread_rank_index(V, s):
    """Least 1-based index r whose leading spectral gaps dominate the trailing ones.

    For every pair of data columns i < j the mixing weights w = V^H (e_i - e_j)
    must satisfy  sum_{l<r} (s_l^2 - s_r^2) |w_l|^2  >=  sum_{l>r} (s_r^2 - s_l^2) |w_l|^2.
    When all data columns are pairwise within sqrt(2)*delta of each other, the
    returned index r guarantees s_r <= delta, i.e. it bounds the numerical rank
    of a stack of similar columns. r = n always satisfies the condition (the
    trailing sum is empty), so the scan terminates.
    """
    W = V.H.planes  # (4, n, n); column t holds V^H e_t
    n = W.shape[2]
    s2 = np.zeros(n)
    s2[: len(s)] = np.asarray(s, dtype=float) ** 2
    if n == 1:
        return 1
    ii, jj = np.triu_indices(n, 1)
    diff = W[:, :, ii] - W[:, :, jj]
    weights = (diff ** 2).sum(axis=0)  # (n, pairs) squared moduli
    for r in range(1, n + 1):
        gaps = s2 - s2[r - 1]
        if np.all(gaps @ weights >= 0.0):
            return r
    return n
