"""Tour of the quaternion building blocks.

Walks through scalar algebra, matrices stored as four real planes, the norms,
the elementwise shrinkage operator, and the quaternion SVD with its energy
curve. Run with:  python demos/quaternion_basics.py
"""

import numpy as np

from qinpaint import (
    QMatrix,
    Quaternion,
    cumulative_energy,
    norm,
    numerical_rank,
    qsvd,
    soft_threshold,
)

# --- scalars -----------------------------------------------------------------

i = Quaternion(0, 1, 0, 0)
j = Quaternion(0, 0, 1, 0)
k = Quaternion(0, 0, 0, 1)

print("i*j =", i * j)          # k
print("j*i =", j * i)          # -k: the product does not commute
print("i*j*k =", i * j * k)    # -1

a = Quaternion(1, 2, -1, 0.5)
print("|a| =", abs(a))
print("a * conj(a) =", a * a.conjugate())  # real, equals |a|^2

# --- matrices ----------------------------------------------------------------

rng = np.random.default_rng(0)
A = QMatrix(rng.standard_normal((4, 6, 4)))

print("\nshape:", A.shape)
print("Frobenius norm:", norm(A, "fro"))
print("entry moduli (first row):", np.round(A.abs()[0], 3))

# shrink every entry's modulus by 1.0; directions are preserved
shrunk = soft_threshold(A, 1.0)
print("moduli after shrinkage (first row):", np.round(shrunk.abs()[0], 3))

# --- the quaternion SVD ------------------------------------------------------

res = qsvd(A)
print("\nsingular values:", np.round(res.s, 4))
print("reconstruction error:", norm(res.reconstruct() - A, "fro") / norm(A, "fro"))
print("nuclear norm:", norm(A, "nuclear"))
print("numerical rank at delta=1.0:", numerical_rank(A, 1.0))
print("cumulative energy:", np.round(cumulative_energy(A), 4))
