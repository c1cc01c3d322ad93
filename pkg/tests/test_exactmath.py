import numpy as np
import pytest

from latbnb.errors import DependentColumns, NegativeInput, NoIntegralSolution, RankDeficient
from latbnb.exactmath import (
    Matrix,
    Rat,
    det,
    gcd_of_maximal_minors,
    gram_det,
    gram_schmidt,
    hnf,
    hnf_pivots,
    inverse_unimodular,
    isqrt_floor,
    kernel_basis,
    rank,
    solve_integral,
)
from helpers import gcd_minors_bruteforce


def random_matrix(rng, m, n, lo=-10, hi=10):
    return Matrix(rng.integers(lo, hi + 1, size=(m, n)).tolist())


class TestGramSchmidt:
    def test_identity_is_its_own_gso(self):
        g = gram_schmidt(Matrix.identity(2))
        assert g.bstar == Matrix.identity(2)
        assert g.mu.data[1][0] == 0
        assert g.bstar_norms_sq == [1, 1]

    def test_stacked_knapsack_columns(self):
        # columns (41,1,0), (38,0,1): mu21 = 1558/1682 in lowest terms
        g = gram_schmidt(Matrix([[41, 38], [1, 0], [0, 1]]))
        assert g.mu.data[1][0] == Rat(779, 841)
        mu = Rat(779, 841)
        expected = [Rat(38) - mu * 41, -mu, Rat(1)]
        assert g.bstar.col(1) == expected

    def test_half_mu_boundary(self):
        g = gram_schmidt(Matrix([[2, 1], [0, 2]]))
        assert g.mu.data[1][0] == Rat(1, 2)
        assert g.bstar.col(1) == [0, 2]

    def test_dependent_columns_rejected(self):
        with pytest.raises(DependentColumns):
            gram_schmidt(Matrix([[1, 2], [2, 4]]))

    def test_reconstruction_orthogonality_and_det(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(1, m + 1))
            M = random_matrix(rng, m, n)
            try:
                g = gram_schmidt(M)
            except DependentColumns:
                continue
            assert g.reconstruct() == M
            for i in range(n):
                for j in range(i):
                    bi, bj = g.bstar.col(i), g.bstar.col(j)
                    assert sum(a * b for a, b in zip(bi, bj)) == 0
            prod = Rat(1)
            for nsq in g.bstar_norms_sq:
                prod *= nsq
            assert prod == gram_det(M)


def _is_hnf_shape(H):
    pivots = hnf_pivots(H)
    cols_seen = set()
    for i, c in pivots:
        piv = H.data[i][c]
        assert piv > 0
        for j in range(c):
            assert 0 <= H.data[i][j] < piv
        for j in range(c + 1, H.cols):
            assert H.data[i][j] == 0
        cols_seen.add(c)
    ncols_nonzero = sum(1 for j in range(H.cols)
                        if any(H.data[i][j] for i in range(H.rows)))
    assert ncols_nonzero == len(pivots)
    assert cols_seen == set(range(len(pivots)))  # zero columns trail


class TestHnf:
    def test_identity(self):
        H, V = hnf(Matrix.identity(3))
        assert H == Matrix.identity(3)
        assert V == Matrix.identity(3)

    @pytest.mark.parametrize("row,expect", [([4, 6], [2, 0]), ([41, 38], [1, 0])])
    def test_gcd_rows(self, row, expect):
        H, V = hnf(Matrix([row]))
        assert H.data == [expect]
        assert Matrix([row]).mul(V) == H

    def test_random_shape_and_transform(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 6))
            M = random_matrix(rng, m, n)
            H, V = hnf(M)
            assert M.mul(V) == H
            assert abs(det(V)) == 1
            _is_hnf_shape(H)


class TestKernelBasis:
    def test_knapsack_row(self):
        K = kernel_basis(Matrix([[41, 38]]))
        assert K.cols == 1
        col = K.col(0)
        assert col in ([38, -41], [-38, 41])

    def test_unit_rows(self):
        assert kernel_basis(Matrix([[1, 0]])).col(0) in ([0, 1], [0, -1])
        K = kernel_basis(Matrix([[1, 0, 0], [0, 1, 0]]))
        assert [abs(x) for x in K.col(0)] == [0, 0, 1]

    def test_rank_deficient_rejected(self):
        with pytest.raises(RankDeficient):
            kernel_basis(Matrix([[1, 2], [2, 4]]))

    def test_generates_all_integral_kernel_points(self):
        rng = np.random.default_rng(17)
        trials = 0
        while trials < 6:
            m = int(rng.integers(1, 3))
            n = int(rng.integers(m + 1, 5))
            A = random_matrix(rng, m, n, 1, 10)
            if rank(A) != m:
                continue
            trials += 1
            K = kernel_basis(A)
            for j in range(K.cols):
                assert all(v == 0 for v in A.mul_vec(K.col(j)))
            # every brute-force kernel point in [-20, 20]^n must be an
            # integer combination of the columns of K
            axes = [np.arange(-20, 21)] * n
            pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")],
                           axis=1)
            Anp = np.array(A.data)
            kerpts = pts[np.all(pts @ Anp.T == 0, axis=1)]
            Knp = np.array(K.data, dtype=float)
            for v in kerpts:
                coef, *_ = np.linalg.lstsq(Knp, v.astype(float), rcond=None)
                coef_int = np.rint(coef).astype(np.int64)
                assert np.all(np.array(K.data) @ coef_int == v)


class TestSolveIntegral:
    def test_knapsack(self):
        A = Matrix([[41, 38]])
        x0 = solve_integral(A, [207])
        assert A.mul_vec(x0) == [207]

    def test_gcd_obstruction(self):
        with pytest.raises(NoIntegralSolution):
            solve_integral(Matrix([[2, 4]]), [3])

    def test_identity(self):
        assert solve_integral(Matrix.identity(3), [4, -5, 6]) == [4, -5, 6]


class TestGramDet:
    def test_stacked_knapsack(self):
        assert gram_det(Matrix([[41, 38], [1, 0], [0, 1]])) == 3126

    def test_identity(self):
        assert gram_det(Matrix.identity(4)) == 1

    def test_kernel_vector(self):
        assert gram_det(Matrix([[38], [-41]])) == 3125  # det(AA^T)/gcd^2


class TestGcdMinors:
    @pytest.mark.parametrize("rows,expect", [
        ([[41, 38]], 1),
        ([[2, 4]], 2),
        ([[2, 0], [0, 3]], 6),
    ])
    def test_examples(self, rows, expect):
        assert gcd_of_maximal_minors(Matrix(rows)) == expect

    def test_matches_minor_enumeration(self):
        rng = np.random.default_rng(19)
        done = 0
        while done < 12:
            m = int(rng.integers(1, 4))
            n = int(rng.integers(m, 6))
            A = random_matrix(rng, m, n)
            try:
                g = gcd_of_maximal_minors(A)
            except RankDeficient:
                continue
            done += 1
            assert g == gcd_minors_bruteforce(A)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            gcd_of_maximal_minors(Matrix([[1, 1], [1, 1]]))


class TestIsqrtFloor:
    def test_examples(self):
        assert isqrt_floor(0) == 0
        assert isqrt_floor(3125) == 55
        assert isqrt_floor(Rat(9, 4)) == 1

    def test_squares_and_predecessors(self):
        for t in list(range(1, 60)) + [10 ** 9, 12345678901]:
            assert isqrt_floor(t * t) == t
            assert isqrt_floor(t * t - 1) == t - 1
            assert isqrt_floor(Rat(t * t, 1)) == t

    def test_negative_rejected(self):
        with pytest.raises(NegativeInput):
            isqrt_floor(-1)
        with pytest.raises(NegativeInput):
            isqrt_floor(Rat(-1, 4))


def test_inverse_unimodular_roundtrip():
    rng = np.random.default_rng(23)
    for _ in range(10):
        M = random_matrix(rng, 4, 4, -4, 4)
        _, V = hnf(M)
        Vinv = inverse_unimodular(V)
        assert V.mul(Vinv) == Matrix.identity(4)
