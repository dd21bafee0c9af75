"""Independent oracles used by the test suite.

Everything here is deliberately written the slow, obvious way (real 4x4
multiplication tables, dense real embeddings, exhaustive scans) so that the
library's complex-embedding shortcuts are checked against a different route.
"""

import numpy as np

from qinpaint import QMatrix, Quaternion


def real_left_matrix(quat):
    """4x4 real matrix of left multiplication by a quaternion, basis (1, i, j, k)."""
    r, i, j, k = quat.components if isinstance(quat, Quaternion) else quat
    return np.array([
        [r, -i, -j, -k],
        [i,  r, -k,  j],
        [j,  k,  r, -i],
        [k, -j,  i,  r],
    ])


def mul_via_table(a, b):
    """Quaternion product through the real multiplication table."""
    return Quaternion(*(real_left_matrix(a) @ b.components))


def real_embedding(A):
    """(4*n1, 4*n2) real block matrix; singular values of A appear 4 times each."""
    n1, n2 = A.shape
    out = np.zeros((4 * n1, 4 * n2))
    for s in range(n1):
        for t in range(n2):
            out[4 * s:4 * s + 4, 4 * t:4 * t + 4] = real_left_matrix(
                A.planes[:, s, t])
    return out


def matmul_via_embedding(A, B):
    """Quaternion matrix product recovered from the real embedding product."""
    prod = real_embedding(A) @ real_embedding(B)
    planes = np.empty((4, A.n1, B.n2))
    for s in range(A.n1):
        for t in range(B.n2):
            planes[:, s, t] = prod[4 * s:4 * s + 4, 4 * t]
    return QMatrix(planes)


def singular_values_via_embedding(A):
    """Every 4th singular value of the real embedding."""
    vals = np.linalg.svd(real_embedding(A), compute_uv=False)
    return vals[0::4]


def random_qmatrix(rng, shape, scale=1.0):
    return QMatrix(rng.standard_normal((4,) + tuple(shape)) * scale)


def random_pure_qmatrix(rng, shape, scale=1.0):
    planes = rng.standard_normal((4,) + tuple(shape)) * scale
    planes[0] = 0.0
    return QMatrix(planes)


def spread_rank_via_scan(V, s):
    """Literal exhaustive scan of the pair condition for r = 1..n."""
    W = V.H.planes
    n = W.shape[2]
    s2 = np.zeros(n)
    s2[:len(s)] = np.asarray(s, dtype=float) ** 2
    for r in range(1, n + 1):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                w2 = ((W[:, :, i] - W[:, :, j]) ** 2).sum(axis=0)
                lhs = sum((s2[l] - s2[r - 1]) * w2[l] for l in range(r - 1))
                rhs = sum((s2[r - 1] - s2[l]) * w2[l] for l in range(r, n))
                if lhs < rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return r
    return n
