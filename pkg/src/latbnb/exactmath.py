"""Exact integer and rational linear algebra.

Everything here is exact: integer matrices hold arbitrary-precision Python
ints, rational scalars are ``gmpy2.mpq`` (``fractions.Fraction`` is a drop-in
fallback). There is no floating point and hence no tolerance anywhere; all
downstream invariants are checked with equalities and integer comparisons.

Conventions:

* matrices are dense, row-major lists of lists; *columns* are the basis
  vectors throughout the package;
* Hermite normal form is column-style: ``H = M @ V`` with ``V`` unimodular,
  pivots positive on a lower staircase, entries left of a pivot reduced
  modulo the pivot, zero columns trailing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency
    from fractions import Fraction as Rat

from .errors import (
    DependentColumns,
    NegativeInput,
    NoIntegralSolution,
    RankDeficient,
)

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)


def q_floor(q) -> int:
    """Exact floor of an int or rational."""
    return int(q.numerator // q.denominator) if not isinstance(q, int) else q


def q_ceil(q) -> int:
    if isinstance(q, int):
        return q
    return int(-((-q.numerator) // q.denominator))


def q_round_half_up(q) -> int:
    """Nearest integer, ties rounded up (used for size reduction)."""
    return q_floor(q + HALF)


def dot(u, v):
    s = 0
    for a, b in zip(u, v):
        s += a * b
    return s


def norm_sq(v):
    return dot(v, v)


class Matrix:
    """Dense exact matrix; entries are ints or rationals."""

    __slots__ = ("data",)

    def __init__(self, data):
        self.data = [list(row) for row in data]
        if not self.data:
            raise ValueError("matrix needs at least one row")
        ncols = len(self.data[0])
        if any(len(row) != ncols for row in self.data):
            raise ValueError("ragged rows")

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls([[0] * c for _ in range(r)])

    @classmethod
    def from_cols(cls, cols) -> "Matrix":
        cols = list(cols)
        if not cols:
            raise ValueError("need at least one column")
        return cls([[col[i] for col in cols] for i in range(len(cols[0]))])

    def col(self, j: int):
        return [row[j] for row in self.data]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix([[self.data[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def mul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = other.transpose().data
        return Matrix([[dot(row, col) for col in ot] for row in self.data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return self.mul(other)

    def mul_vec(self, v):
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return [dot(row, v) for row in self.data]

    def copy(self) -> "Matrix":
        return Matrix(self.data)

    def to_lists(self):
        """Plain nested lists of Python ints (for JSON)."""
        return [[int(x) for x in row] for row in self.data]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols
                and all(a == b for ra, rb in zip(self.data, other.data)
                        for a, b in zip(ra, rb)))

    def __repr__(self) -> str:
        return f"Matrix({self.data!r})"


# Spec-facing aliases: integer and rational matrices share the representation.
IntMatrix = Matrix
RatMatrix = Matrix


@dataclass
class GsoData:
    """Exact Gram-Schmidt data for the columns b_1..b_r of a matrix.

    ``bstar`` holds the orthogonalized columns, ``mu`` is lower triangular
    with unit diagonal so that ``b_i = sum_j mu[i][j] * bstar_j``, and
    ``bstar_norms_sq[i]`` is ``<b_i*, b_i*>``.
    """

    bstar: Matrix
    mu: Matrix
    bstar_norms_sq: list

    def reconstruct(self) -> Matrix:
        """Rebuild the original matrix from the decomposition (exact)."""
        return self.bstar.mul(self.mu.transpose())


def gram_schmidt(basis: Matrix) -> GsoData:
    """Exact Gram-Schmidt orthogonalization of the columns of ``basis``.

    Raises:
        DependentColumns: if some orthogonalized vector vanishes.
    """
    cols = basis.columns()
    r = len(cols)
    bstar = []
    norms = []
    mu_rows = []
    for i in range(r):
        v = [Rat(x) for x in cols[i]]
        murow = [ZERO] * r
        for j in range(i):
            m = Rat(dot(cols[i], bstar[j])) / norms[j]
            murow[j] = m
            if m:
                bj = bstar[j]
                v = [a - m * b for a, b in zip(v, bj)]
        murow[i] = ONE
        nsq = norm_sq(v)
        if nsq == 0:
            raise DependentColumns(f"column {i} is dependent on earlier columns")
        bstar.append(v)
        norms.append(nsq)
        mu_rows.append(murow)
    return GsoData(Matrix.from_cols(bstar), Matrix(mu_rows), norms)


def _col_sub(mat, j: int, c: int, q) -> None:
    """column_j -= q * column_c, in place on a list-of-rows."""
    for row in mat:
        row[j] -= q * row[c]


def _col_swap(mat, j: int, c: int) -> None:
    for row in mat:
        row[j], row[c] = row[c], row[j]


def _col_neg(mat, j: int) -> None:
    for row in mat:
        row[j] = -row[j]


def hnf(M: Matrix):
    """Column-style Hermite normal form.

    Returns ``(H, V)`` with ``H = M @ V``, ``V`` unimodular, pivots positive
    on a lower staircase, entries left of each pivot reduced modulo it, and
    zero columns trailing.
    """
    m, n = M.rows, M.cols
    H = [[int(x) for x in row] for row in M.data]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    c = 0
    for row in range(m):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if H[row][j] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: (abs(H[row][j]), j))
            if jmin != c:
                _col_swap(H, jmin, c)
                _col_swap(V, jmin, c)
            if H[row][c] < 0:
                _col_neg(H, c)
                _col_neg(V, c)
            piv = H[row][c]
            clean = True
            for j in range(c + 1, n):
                if H[row][j]:
                    q = H[row][j] // piv
                    if q:
                        _col_sub(H, j, c, q)
                        _col_sub(V, j, c, q)
                    if H[row][j]:
                        clean = False
            if clean:
                break
        if c < n and H[row][c] != 0:
            piv = H[row][c]
            for j in range(c):
                q = H[row][j] // piv
                if q:
                    _col_sub(H, j, c, q)
                    _col_sub(V, j, c, q)
            c += 1
    return Matrix(H), Matrix(V)


def hnf_pivots(H: Matrix):
    """(row, col) pivot positions of a column-style HNF matrix."""
    pivots = []
    c = 0
    for i in range(H.rows):
        if c < H.cols and H.data[i][c] != 0:
            pivots.append((i, c))
            c += 1
    return pivots


def rank(M: Matrix) -> int:
    H, _ = hnf(M)
    return len(hnf_pivots(H))


def kernel_basis(A: Matrix) -> Matrix:
    """Basis of the integer kernel lattice {x in Z^n | A x = 0}.

    The columns of the returned n x (n-m) matrix generate *all* integral
    kernel points, not merely the rational kernel: they are the unimodular
    multiplier columns matching the zero columns of the HNF.

    Raises:
        RankDeficient: if the rows of ``A`` are dependent.
    """
    H, V = hnf(A)
    pivots = hnf_pivots(H)
    if len(pivots) < A.rows:
        raise RankDeficient("rows of A are linearly dependent")
    zero_cols = [j for j in range(H.cols)
                 if all(H.data[i][j] == 0 for i in range(H.rows))]
    if not zero_cols:
        raise RankDeficient("kernel is trivial (m = n)")
    return Matrix.from_cols([V.col(j) for j in zero_cols])


def solve_integral(A: Matrix, b):
    """Some integer solution x0 of A x0 = b.

    Raises:
        NoIntegralSolution: if ``b`` is not in the image lattice of ``A``.
        RankDeficient: if the rows of ``A`` are dependent.
    """
    if len(b) != A.rows:
        raise ValueError("shape mismatch")
    H, V = hnf(A)
    pivots = hnf_pivots(H)
    if len(pivots) < A.rows:
        raise RankDeficient("rows of A are linearly dependent")
    y = [0] * A.cols
    for i, c in pivots:
        resid = int(b[i]) - sum(H.data[i][j] * y[j] for j in range(c))
        piv = H.data[i][c]
        if resid % piv:
            raise NoIntegralSolution(
                f"row {i}: {resid} not divisible by pivot {piv}")
        y[c] = resid // piv
    return V.mul_vec(y)


def det(M: Matrix) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = M.rows
    if n != M.cols:
        raise ValueError("square matrix required")
    a = [[int(x) for x in row] for row in M.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def gram_det(M: Matrix) -> int:
    """det(M^T M) for a column matrix; the squared lattice determinant."""
    if M.cols == 0:
        return 1
    return det(M.transpose().mul(M))


def gcd_of_maximal_minors(A: Matrix) -> int:
    """gcd of the m x m subdeterminants of a full-row-rank m x n matrix.

    Computed as the product of the HNF pivot entries, not by enumerating
    minors.
    """
    H, _ = hnf(A)
    pivots = hnf_pivots(H)
    if len(pivots) < A.rows:
        raise RankDeficient("rows of A are linearly dependent")
    g = 1
    for i, c in pivots:
        g *= H.data[i][c]
    return abs(g)


def isqrt_floor(q) -> int:
    """Largest integer t with t*t <= q, for a nonnegative int or rational."""
    if isinstance(q, int):
        if q < 0:
            raise NegativeInput("isqrt_floor of a negative number")
        return math.isqrt(q)
    if q < 0:
        raise NegativeInput("isqrt_floor of a negative number")
    num, den = q.numerator, q.denominator
    t = math.isqrt(int(num // den))
    while (t + 1) * (t + 1) * den <= num:
        t += 1
    while t * t * den > num:
        t -= 1
    return int(t)


def solve_rational(M: Matrix, rhs_cols) -> list:
    """Solve M X = rhs for a square nonsingular M, exactly over rationals.

    ``rhs_cols`` is a list of right-hand-side column vectors; returns the
    solution columns in the same order.
    """
    n = M.rows
    if n != M.cols:
        raise ValueError("square matrix required")
    k = len(rhs_cols)
    a = [[Rat(x) for x in row] + [Rat(col[i]) for col in rhs_cols]
         for i, row in enumerate(M.data)]
    for colidx in range(n):
        piv = None
        for i in range(colidx, n):
            if a[i][colidx] != 0:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        a[colidx], a[piv] = a[piv], a[colidx]
        pv = a[colidx][colidx]
        a[colidx] = [x / pv for x in a[colidx]]
        for i in range(n):
            if i != colidx and a[i][colidx]:
                f = a[i][colidx]
                arow, prow = a[i], a[colidx]
                a[i] = [x - f * y for x, y in zip(arow, prow)]
    return [[a[i][n + j] for i in range(n)] for j in range(k)]


def inv_rational(M: Matrix) -> Matrix:
    """Exact inverse of a square nonsingular matrix, rational entries."""
    n = M.rows
    eye = [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    return Matrix.from_cols(solve_rational(M, eye))


def inverse_unimodular(U: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix, returned with int entries."""
    inv = inv_rational(U)
    out = []
    for row in inv.data:
        irow = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            irow.append(int(x.numerator))
        out.append(irow)
    return Matrix(out)
