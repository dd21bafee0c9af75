import numpy as np
import pytest

from qinpaint import QMatrix, Quaternion, TOLERANCES, norm, soft_threshold
from qinpaint.quatmat import hamilton

from _oracles import matmul_via_embedding, mul_via_table, random_qmatrix


I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)


class TestQuaternion:
    def test_defining_relations(self):
        assert I * J == K
        assert J * I == -K
        assert I * I == Quaternion(-1)
        assert J * J == Quaternion(-1)
        assert K * K == Quaternion(-1)
        assert I * J * K == Quaternion(-1)

    def test_expand_product(self):
        # frozen from the 4x4 multiplication-table oracle: (1+i)(1+j) = 1+i+j+k
        a = Quaternion(1, 1, 0, 0)
        b = Quaternion(1, 0, 1, 0)
        assert a * b == Quaternion(1, 1, 1, 1)
        assert a * b == mul_via_table(a, b)

    def test_product_matches_table_oracle(self, rng):
        for _ in range(50):
            a = Quaternion(*rng.standard_normal(4))
            b = Quaternion(*rng.standard_normal(4))
            got = a * b
            want = mul_via_table(a, b)
            assert np.allclose(got.components, want.components, atol=1e-12)

    def test_modulus_multiplicative(self, rng):
        for _ in range(30):
            a = Quaternion(*rng.standard_normal(4))
            b = Quaternion(*rng.standard_normal(4))
            assert abs(a * b) == pytest.approx(abs(a) * abs(b), rel=1e-12)

    def test_conjugate_gives_squared_modulus(self, rng):
        a = Quaternion(*rng.standard_normal(4))
        p = a * a.conjugate()
        assert p.r == pytest.approx(abs(a) ** 2, rel=1e-12)
        assert abs(p.i) + abs(p.j) + abs(p.k) < 1e-12

    def test_associativity(self, rng):
        for _ in range(200):
            a, b, c = (Quaternion(*rng.standard_normal(4)) for _ in range(3))
            left = (a * b) * c
            right = a * (b * c)
            scale = max(1.0, abs(left))
            assert abs(left - right) <= TOLERANCES.algebra * scale

    def test_scalar_mix(self):
        assert 2 * I == Quaternion(0, 2, 0, 0)
        assert (I + 1) - 1 == I
        assert I / 2 == Quaternion(0, 0.5, 0, 0)


class TestQMatrix:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            QMatrix(np.zeros((3, 2, 2)))

    def test_matmul_identity(self, rng):
        A = random_qmatrix(rng, (3, 3))
        E = QMatrix.from_parts(r=np.eye(3))
        np.testing.assert_allclose((A @ E).planes, A.planes, atol=1e-14)

    def test_matmul_unit_scalars_lifted(self):
        A = QMatrix.from_parts(i=np.eye(2))
        B = QMatrix.from_parts(j=np.eye(2))
        C = A @ B
        np.testing.assert_allclose(C.k, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(C.planes[:3], 0, atol=1e-15)

    def test_matmul_against_real_embedding(self, rng):
        A = random_qmatrix(rng, (3, 2))
        B = random_qmatrix(rng, (2, 2))
        want = matmul_via_embedding(A, B)
        np.testing.assert_allclose((A @ B).planes, want.planes, atol=1e-12)

    def test_matmul_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            random_qmatrix(rng, (3, 2)) @ random_qmatrix(rng, (3, 2))

    def test_hermitian(self, rng):
        E = QMatrix.from_parts(r=np.eye(4))
        np.testing.assert_allclose(E.H.planes, E.planes)
        one_i = QMatrix.from_parts(i=np.ones((1, 1)))
        assert one_i.H[0, 0] == Quaternion(0, -1, 0, 0)
        A = random_qmatrix(rng, (3, 2))
        assert A.H.shape == (2, 3)
        assert A.H[1, 2] == A[2, 1].conjugate()
        np.testing.assert_allclose(A.H.H.planes, A.planes)

    def test_getitem(self, rng):
        A = random_qmatrix(rng, (4, 5))
        sub = A[1:3, 2:4]
        assert sub.shape == (2, 2)
        assert sub[0, 0] == A[1, 2]
        with pytest.raises(TypeError):
            A[1]

    def test_entrywise_quaternion_scalar(self, rng):
        A = random_qmatrix(rng, (2, 2))
        right = A * J
        left = J * A
        for s in range(2):
            for t in range(2):
                assert np.allclose((A[s, t] * J).components, right[s, t].components)
                assert np.allclose((J * A[s, t]).components, left[s, t].components)


class TestNorms:
    def test_zero_matrix_all_kinds(self):
        Z = QMatrix.zeros((3, 4))
        for kind in ("l1", "linf", "fro", "spectral", "nuclear"):
            assert norm(Z, kind) == 0.0

    def test_unit_entry_fro(self):
        A = QMatrix(np.ones((4, 1, 1)))
        assert norm(A, "fro") == pytest.approx(2.0)  # sqrt(1+1+1+1)
        assert norm(A, "l1") == pytest.approx(2.0)
        assert norm(A, "linf") == pytest.approx(2.0)

    def test_nuclear_against_real_embedding(self, rng):
        from _oracles import singular_values_via_embedding

        A = random_qmatrix(rng, (4, 3))
        want = singular_values_via_embedding(A).sum()
        assert norm(A, "nuclear") == pytest.approx(want, rel=1e-10)

    def test_fro_equals_inner_product(self, rng):
        # <A, A> = Tr(A^H A) must be real and equal ||A||_F^2
        for _ in range(20):
            A = random_qmatrix(rng, (5, 3))
            G = A.H @ A
            trace = Quaternion(0, 0, 0, 0)
            for t in range(3):
                trace = trace + G[t, t]
            f2 = norm(A, "fro") ** 2
            assert trace.r == pytest.approx(f2, rel=TOLERANCES.algebra * 10)
            assert abs(trace.i) + abs(trace.j) + abs(trace.k) < 1e-9

    def test_unknown_kind(self, rng):
        with pytest.raises(ValueError):
            norm(random_qmatrix(rng, (2, 2)), "l2")


class TestElementwiseOps:
    def test_abs_zero_and_pythagorean(self):
        assert QMatrix.zeros((2, 2)).abs().max() == 0.0
        A = QMatrix.from_parts(j=np.array([[3.0]]), k=np.array([[4.0]]))
        assert A.abs()[0, 0] == pytest.approx(5.0)

    def test_abs_matches_planes(self, rng):
        A = random_qmatrix(rng, (4, 6))
        np.testing.assert_allclose(A.abs(), np.sqrt((A.planes ** 2).sum(0)))

    def test_sign_zero_and_unit(self, rng):
        assert QMatrix.zeros((1, 1)).sign().abs()[0, 0] == 0.0
        A = QMatrix.from_parts(k=np.array([[2.0]]))
        assert A.sign()[0, 0] == K
        B = random_qmatrix(rng, (5, 5))
        moduli = B.sign().abs()
        assert np.all((np.isclose(moduli, 1.0, atol=1e-12)) | (moduli == 0.0))

    def test_sign_times_abs_reconstructs(self, rng):
        A = random_qmatrix(rng, (6, 4))
        back = A.sign() * A.abs()
        np.testing.assert_allclose(back.planes, A.planes, atol=1e-12)

    def test_soft_threshold_direction_and_floor(self):
        A = QMatrix.from_parts(i=np.array([[3.0]]), j=np.array([[4.0]]))  # modulus 5
        out = soft_threshold(A, 2.0)
        assert out.abs()[0, 0] == pytest.approx(3.0)
        np.testing.assert_allclose(out.sign().planes, A.sign().planes, atol=1e-14)
        assert soft_threshold(A, 6.0).abs()[0, 0] == 0.0

    def test_soft_threshold_rejects_nonpositive(self, rng):
        A = random_qmatrix(rng, (2, 2))
        with pytest.raises(ValueError):
            soft_threshold(A, 0.0)
        with pytest.raises(ValueError):
            soft_threshold(A, -1.0)

    def test_soft_threshold_is_prox_on_grid(self, rng):
        # argmin_s tau*|s| + 0.5*|s - a|^2 found by a dense 4d grid search
        a = Quaternion(*rng.standard_normal(4) * 2)
        tau = 0.8
        reach = abs(a) + tau
        axis = np.linspace(-reach, reach, 41)
        grids = np.meshgrid(axis, axis, axis, axis, indexing="ij")
        cand = np.stack([g.ravel() for g in grids])
        diff = cand - a.components[:, None]
        objective = tau * np.sqrt((cand ** 2).sum(0)) + 0.5 * (diff ** 2).sum(0)
        best = cand[:, np.argmin(objective)]
        out = soft_threshold(QMatrix(a.components.reshape(4, 1, 1)), tau)
        spacing = axis[1] - axis[0]
        assert np.linalg.norm(out.planes.ravel() - best) <= 2 * spacing

    def test_soft_threshold_nonexpansive(self, rng):
        for _ in range(30):
            A = random_qmatrix(rng, (4, 4))
            B = random_qmatrix(rng, (4, 4))
            tau = float(rng.uniform(0.1, 2.0))
            d_out = norm(soft_threshold(A, tau) - soft_threshold(B, tau), "fro")
            assert d_out <= norm(A - B, "fro") + 1e-12


def test_hamilton_broadcasts(rng):
    a = rng.standard_normal((4, 3, 2))
    b = rng.standard_normal((4, 1, 2))
    out = hamilton(a, b)
    assert out.shape == (4, 3, 2)
    one = hamilton(a, np.array([1.0, 0, 0, 0]).reshape(4, 1, 1))
    np.testing.assert_allclose(one, a)
