import numpy as np
import pytest

from adiosc.abd import AbdMatrix, SingularMatrixError, factorize
from adiosc.lines import HeatStep, assemble
from adiosc.mesh import Partition1D, SplineSpace


def random_dd(rng, n, r, dominance=None):
    """Random ABD matrix made diagonally dominant row by row."""
    m, w = r - 1, r + 1
    if dominance is None:
        dominance = 2.0 * w
    blocks = rng.uniform(-1.0, 1.0, (n, m, w))
    top = rng.uniform(-1.0, 1.0, w)
    bottom = rng.uniform(-1.0, 1.0, w)
    top[0] += dominance
    bottom[-1] += dominance
    for i in range(n):
        for j in range(m):
            blocks[i, j, j + 1] += dominance
    return AbdMatrix(top, blocks, bottom)


def identity_abd(n, r):
    m, w = r - 1, r + 1
    blocks = np.zeros((n, m, w))
    for i in range(n):
        for j in range(m):
            blocks[i, j, j + 1] = 1.0
    top = np.zeros(w)
    top[0] = 1.0
    bottom = np.zeros(w)
    bottom[-1] = 1.0
    return AbdMatrix(top, blocks, bottom)


def rel_residual(A, x, b):
    dense = A.to_dense()
    num = np.abs(dense @ x - b).max()
    den = np.abs(dense).sum(axis=1).max() * np.abs(x).max() + np.abs(b).max()
    return num / den


class TestStructure:
    def test_order_and_shape_validation(self):
        A = identity_abd(3, 3)
        assert A.order == 3 * 2 + 2 and A.degree == 3
        with pytest.raises(ValueError):
            AbdMatrix(np.zeros(4), np.zeros((2, 2, 5)), np.zeros(4))

    def test_to_dense_layout(self):
        rng = np.random.default_rng(0)
        A = random_dd(rng, 3, 4)
        dense = A.to_dense()
        m, w = 3, 5
        # block i occupies rows 1+i*m.. and columns i*m..i*m+w
        for i in range(3):
            sub = dense[1 + i * m:1 + (i + 1) * m, i * m:i * m + w]
            np.testing.assert_array_equal(sub, A.blocks[i])
            outside = dense[1 + i * m:1 + (i + 1) * m].copy()
            outside[:, i * m:i * m + w] = 0.0
            assert not outside.any()

    def test_matmat_matches_dense(self):
        rng = np.random.default_rng(1)
        A = random_dd(rng, 4, 5)
        x = rng.standard_normal((A.order, 3))
        np.testing.assert_allclose(A.matmat(x), A.to_dense() @ x, atol=1e-12)


class TestFactorizeSolve:
    def test_identity_solve(self):
        A = identity_abd(4, 4)
        f = factorize(A)
        rng = np.random.default_rng(2)
        b = rng.standard_normal(A.order)
        np.testing.assert_array_equal(f.solve(b), b)

    def test_reconstruct_dense_oracle(self):
        rng = np.random.default_rng(3)
        A = random_dd(rng, 3, 3)
        rec = factorize(A).reconstruct()
        da, dr = A.to_dense(), rec.to_dense()
        assert np.abs(da - dr).max() / np.abs(da).max() <= 1e-12

    def test_known_solution_of_ones(self):
        rng = np.random.default_rng(4)
        A = random_dd(rng, 5, 4)
        ones = np.ones(A.order)
        b = A.matmat(ones)
        x = factorize(A).solve(b)
        np.testing.assert_allclose(x, 1.0, atol=1e-11)

    def test_multi_rhs_bitwise_matches_single(self):
        rng = np.random.default_rng(5)
        A = random_dd(rng, 6, 4)
        f = factorize(A)
        B = rng.standard_normal((A.order, 64))
        batched = f.solve(B)
        for j in range(64):
            np.testing.assert_array_equal(batched[:, j], f.solve(B[:, j]))

    def test_line_order_permutation_equivariance(self):
        # reordering the RHS rows permutes the outputs bit for bit
        rng = np.random.default_rng(6)
        A = random_dd(rng, 5, 5)
        f = factorize(A)
        rows = rng.standard_normal((40, A.order))
        perm = rng.permutation(40)
        np.testing.assert_array_equal(f.solve_rows(rows)[perm],
                                      f.solve_rows(rows[perm]))

    def test_well_conditioned_vs_dense_lu(self):
        rng = np.random.default_rng(7)
        A = random_dd(rng, 10, 3)        # M = 22; use the M=32 case too
        for n, r in ((10, 3), (10, 4)):  # orders 22 and 32
            A = random_dd(rng, n, r)
            b = rng.standard_normal(A.order)
            x = factorize(A).solve(b)
            ref = np.linalg.solve(A.to_dense(), b)
            assert np.abs(x - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())

    def test_residual_contract(self):
        rng = np.random.default_rng(8)
        for n, r in ((1, 3), (2, 6), (7, 4)):
            A = random_dd(rng, n, r)
            b = rng.standard_normal(A.order)
            x = factorize(A).solve(b)
            assert rel_residual(A, x, b) <= 1e-10

    def test_differential_200_random_systems(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            r = int(rng.integers(3, 7))
            A = random_dd(rng, n, r)
            b = rng.standard_normal(A.order)
            x = factorize(A).solve(b)
            ref = np.linalg.solve(A.to_dense(), b)
            scale = max(1.0, np.abs(ref).max())
            assert np.abs(x - ref).max() <= 1e-9 * scale

    def test_determinism(self):
        rng = np.random.default_rng(10)
        A = random_dd(rng, 6, 5)
        b = rng.standard_normal((A.order, 8))
        x1 = factorize(A).solve(b)
        x2 = factorize(A).solve(b)
        np.testing.assert_array_equal(x1, x2)

    def test_singular_reports_row(self):
        A = identity_abd(3, 3)
        A.blocks[1, :, :] = 0.0
        with pytest.raises(SingularMatrixError) as err:
            factorize(A)
        assert isinstance(err.value.row, int)

    def test_dimension_mismatch(self):
        A = identity_abd(3, 3)
        f = factorize(A)
        with pytest.raises(ValueError):
            f.solve(np.zeros(A.order + 1))

    def test_heat_operator_factorization(self):
        # the x-direction half-step operator of a diffusion solve
        space = SplineSpace(Partition1D.uniform(0.0, 1.0, 10), 3)
        A = assemble(space, HeatStep(0.5 * 0.01))     # tau = h^2, D = 1
        f = factorize(A)
        rng = np.random.default_rng(11)
        b = rng.standard_normal(A.order)
        x = f.solve(b)
        assert rel_residual(A, x, b) <= 1e-12
        ref = np.linalg.solve(A.to_dense(), b)
        np.testing.assert_allclose(x, ref, atol=1e-11)

    def test_vector_and_matrix_shapes(self):
        rng = np.random.default_rng(12)
        A = random_dd(rng, 4, 3)
        b = rng.standard_normal(A.order)
        assert factorize(A).solve(b).shape == (A.order,)
        B = rng.standard_normal((A.order, 5))
        assert factorize(A).solve(B).shape == (A.order, 5)
