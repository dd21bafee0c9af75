"""Robust completion of a synthetic low-rank quaternion matrix.

Builds a rank-5 ground truth, hides 10% of the entries, corrupts a sparse 5%
of the rest, and recovers both parts with the ADMM solver. Run with:
python demos/matrix_completion.py
"""

import numpy as np

from qinpaint import ObservationMask, QMatrix, SolverConfig, complete, norm, project

rng = np.random.default_rng(1)

# rank-5 ground truth, 100 x 80
L0 = QMatrix(rng.standard_normal((4, 100, 5))) @ QMatrix(rng.standard_normal((4, 5, 80)))

# sparse corruption on 5% of the entries, at the data's own magnitude
locations = rng.random((100, 80)) < 0.05
directions = rng.standard_normal((4, 100, 80))
directions /= np.sqrt((directions ** 2).sum(axis=0))
S0 = QMatrix(directions * norm(L0, "linf") * locations)

# observe 90% of the corrupted data
mask = ObservationMask.random((100, 80), 0.9, rng=2)
X = project(L0 + S0, mask)

result = complete(X, mask, SolverConfig(tol=1e-6, max_iters=500))
rel_err = norm(result.L - L0, "fro") / norm(L0, "fro")

print(f"iterations used: {result.iterations}")
print(f"relative error of the low-rank part: {rel_err:.2e}")
print(f"sparse part l1: {norm(result.S, 'l1'):.1f} (true {norm(S0, 'l1'):.1f})")

detected = result.S.abs() > 1e-3 * norm(L0, "linf")
hits = np.count_nonzero(detected & locations & mask.observed)
print(f"corruptions located: {hits} of {np.count_nonzero(locations & mask.observed)} observed ones")
