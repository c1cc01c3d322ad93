"""Lattice basis reduction with exact arithmetic.

LLL with rational Gram-Schmidt data, Korkine-Zolotarev (KZ) reduction driven
by exact shortest-vector enumeration on projected lattices, reciprocal (dual)
bases, and reciprocal-KZ (RKZ) reduction defined by "the reciprocal basis is
KZ reduced".

All reductions return the transformed basis together with the unimodular
column transform U (output = input @ U), normalize column signs so the first
nonzero entry is positive, and are deterministic: shortest-vector ties are
broken by lexicographic order of the coefficient vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DependentColumns, DimensionCapExceeded
from .exactmath import (
    GsoData,
    Matrix,
    Rat,
    dot,
    gram_schmidt,
    hnf,
    inverse_unimodular,
    inv_rational,
    q_round_half_up,
    solve_rational,
)

RAW, LLL, KZ, RKZ = "raw", "lll", "kz", "rkz"


@dataclass
class ReductionParams:
    delta: Rat = field(default_factory=lambda: Rat(3, 4))
    svp_dim_cap: int = 34

    def __post_init__(self):
        self.delta = Rat(self.delta)
        if not Rat(1, 4) < self.delta <= 1:
            raise ValueError("delta must lie in (1/4, 1]")
        if self.svp_dim_cap < 1:
            raise ValueError("svp_dim_cap must be positive")


DEFAULT_PARAMS = ReductionParams()


@dataclass
class LatticeBasis:
    basis: Matrix
    gso: GsoData
    status: str = RAW


def lattice_basis(M: Matrix, status: str = RAW) -> LatticeBasis:
    """Wrap a column basis, computing (and thereby validating) its GSO."""
    return LatticeBasis(basis=M, gso=gram_schmidt(M), status=status)


# -- internal working representation: lists of integer column vectors --------

def _gso_cols(cols):
    """(mu, norms, bstar) of integer columns; mu has a unit diagonal."""
    r = len(cols)
    bstar, norms, mu = [], [], []
    for i in range(r):
        v = [Rat(x) for x in cols[i]]
        row = [Rat(0)] * r
        for j in range(i):
            m = Rat(dot(cols[i], bstar[j])) / norms[j]
            row[j] = m
            if m:
                bj = bstar[j]
                v = [a - m * b for a, b in zip(v, bj)]
        row[i] = Rat(1)
        nsq = dot(v, v)
        if nsq == 0:
            raise DependentColumns(f"column {i} is dependent on earlier columns")
        bstar.append(v)
        norms.append(nsq)
        mu.append(row)
    return mu, norms, bstar


def _size_reduce_col(cols, U, mu, k):
    """Make |mu[k][j]| <= 1/2 for all j < k; updates cols, U and mu in place."""
    for j in range(k - 1, -1, -1):
        r = q_round_half_up(mu[k][j])
        if r:
            ck, cj = cols[k], cols[j]
            cols[k] = [a - r * b for a, b in zip(ck, cj)]
            uk, uj = U[k], U[j]
            U[k] = [a - r * b for a, b in zip(uk, uj)]
            mk, mj = mu[k], mu[j]
            for t in range(j + 1):
                mk[t] -= r * mj[t]


def _lll_in_place(cols, U, delta):
    """Classic LLL on integer columns; U tracks the column transform."""
    mu, norms, bstar = _gso_cols(cols)
    r = len(cols)

    def recompute_from(s):
        for i in range(s, r):
            v = [Rat(x) for x in cols[i]]
            row = mu[i]
            for j in range(i):
                m = Rat(dot(cols[i], bstar[j])) / norms[j]
                row[j] = m
                if m:
                    bj = bstar[j]
                    v = [a - m * b for a, b in zip(v, bj)]
            for t in range(i, r):
                row[t] = Rat(1) if t == i else Rat(0)
            bstar[i] = v
            norms[i] = dot(v, v)

    k = 1
    while k < r:
        _size_reduce_col(cols, U, mu, k)
        if norms[k] + mu[k][k - 1] ** 2 * norms[k - 1] >= delta * norms[k - 1]:
            k += 1
        else:
            cols[k - 1], cols[k] = cols[k], cols[k - 1]
            U[k - 1], U[k] = U[k], U[k - 1]
            recompute_from(k - 1)
            k = max(k - 1, 1)
    return mu, norms


def _normalize_signs(cols, U):
    for k, col in enumerate(cols):
        lead = next((x for x in col if x != 0), 0)
        if lead < 0:
            cols[k] = [-x for x in col]
            U[k] = [-x for x in U[k]]


def _projected_basis_norms(mu, norms, s):
    """Squared norms of the basis vectors projected at level s."""
    r = len(norms)
    out = []
    for j in range(s, r):
        val = norms[j]
        for t in range(s, j):
            val = val + mu[j][t] ** 2 * norms[t]
        out.append(val)
    return out


def _svp_enum(mu, norms, s):
    """Exact shortest nonzero vector of the lattice projected at level ``s``.

    Returns ``(cost, coeffs)`` where coeffs is the integer coefficient tuple
    (length r - s) on the projected basis vectors. Depth-first
    Schnorr-Euchner search around the interval centers; among equal-norm
    vectors the lexicographically smallest coefficient tuple wins.
    """
    r = len(norms)
    proj = _projected_basis_norms(mu, norms, s)
    jmin = min(range(len(proj)), key=lambda j: (proj[j], j))
    init = tuple(1 if t == jmin else 0 for t in range(r - s))
    best_cost = proj[jmin]
    best_coef = init
    u = [0] * r

    def rec(j, acc):
        nonlocal best_cost, best_coef
        if j < s:
            tup = tuple(u[s:])
            if any(tup) and (acc < best_cost
                             or (acc == best_cost and tup < best_coef)):
                best_cost, best_coef = acc, tup
            return
        z = Rat(0)
        for t in range(j + 1, r):
            if u[t]:
                z -= mu[t][j] * u[t]
        u0 = q_round_half_up(z)
        cj = norms[j]
        for base, step in ((u0, 1), (u0 - 1, -1)):
            v = base
            while True:
                d = v - z
                cost = acc + cj * d * d
                if cost > best_cost:
                    break
                u[j] = v
                rec(j - 1, cost)
                v += step
        u[j] = 0

    rec(r - 1, Rat(0))
    return best_cost, best_coef


def _require_cap(r, params):
    if r > params.svp_dim_cap:
        raise DimensionCapExceeded(
            f"rank {r} exceeds enumeration cap {params.svp_dim_cap}")


def lll_reduce(L: LatticeBasis, params: ReductionParams = DEFAULT_PARAMS):
    """LLL-reduce; returns (reduced LatticeBasis, unimodular U)."""
    cols = L.basis.columns()
    U = [[1 if i == j else 0 for i in range(len(cols))] for j in range(len(cols))]
    _lll_in_place(cols, U, params.delta)
    _normalize_signs(cols, U)
    out = Matrix.from_cols(cols)
    return lattice_basis(out, status=LLL), Matrix.from_cols(U)


def shortest_vector(L: LatticeBasis, params: ReductionParams = DEFAULT_PARAMS):
    """A shortest nonzero lattice vector and its exact squared norm.

    The basis is LLL-preprocessed internally before enumeration.
    """
    r = L.basis.cols
    _require_cap(r, params)
    cols = L.basis.columns()
    U = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    mu, norms = _lll_in_place(cols, U, params.delta)
    cost, coef = _svp_enum(mu, norms, 0)
    vec = [sum(c * col[i] for c, col in zip(coef, cols)) for i in range(len(cols[0]))]
    nsq = dot(vec, vec)
    assert nsq == cost
    return vec, int(nsq)


def _unimodular_with_first_column(u):
    """A unimodular integer matrix whose first column is the primitive u."""
    H, V = hnf(Matrix([list(u)]))
    if abs(H.data[0][0]) != 1:
        raise ValueError("coefficient vector is not primitive")
    F = inverse_unimodular(V.transpose())
    if H.data[0][0] == -1:
        for row in F.data:
            row[0] = -row[0]
    return F


def _apply_block(cols, U, s, F):
    """columns[s:] = columns[s:] @ F (and the same on U)."""
    t = F.cols
    for target in (cols, U):
        block = target[s:s + t]
        dim = len(block[0])
        newblock = [[sum(block[a][i] * F.data[a][b] for a in range(t))
                     for i in range(dim)] for b in range(t)]
        target[s:s + t] = newblock


def _kz_in_place(cols, U, params):
    r = len(cols)
    _lll_in_place(cols, U, params.delta)
    for i in range(r):
        mu, norms, _ = _gso_cols(cols)
        cost, coef = _svp_enum(mu, norms, i)
        if cost < norms[i]:
            F = _unimodular_with_first_column(coef)
            _apply_block(cols, U, i, F)
            mu, norms, _ = _gso_cols(cols)
            for k in range(i, r):
                _size_reduce_col(cols, U, mu, k)
    mu, _, _ = _gso_cols(cols)
    for k in range(1, r):
        _size_reduce_col(cols, U, mu, k)


def kz_reduce(L: LatticeBasis, params: ReductionParams = DEFAULT_PARAMS):
    """Korkine-Zolotarev reduction; every projected b_i(i) achieves the
    shortest nonzero norm of its projected lattice, and |mu_ij| <= 1/2."""
    r = L.basis.cols
    _require_cap(r, params)
    cols = L.basis.columns()
    U = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    _kz_in_place(cols, U, params)
    _normalize_signs(cols, U)
    return lattice_basis(Matrix.from_cols(cols), status=KZ), Matrix.from_cols(U)


def reciprocal_basis(L: LatticeBasis) -> Matrix:
    """The unique reciprocal basis b'_1..b'_r with <b_i, b'_j> = 1 iff
    i + j = r + 1 (else 0); rational entries, spans lin(L)."""
    B = L.basis
    gram = B.transpose().mul(B)
    R = B.mul(inv_rational(gram))
    return Matrix.from_cols(list(reversed(R.columns())))


def _scale_to_int(M: Matrix):
    """(integer matrix, common denominator d) with int = d * M."""
    d = 1
    for row in M.data:
        for x in row:
            xd = x.denominator if not isinstance(x, int) else 1
            d = d * xd // math.gcd(d, int(xd))
    data = [[int(x * d) for x in row] for row in M.data]
    return Matrix(data), d


def rkz_reduce(L: LatticeBasis, params: ReductionParams = DEFAULT_PARAMS):
    """Reciprocal-KZ reduction: the reciprocal of the output is KZ reduced.

    Implemented by KZ-reducing the (denominator-cleared) reciprocal basis and
    taking the reciprocal of the result, which restores the pairing order.
    """
    r = L.basis.cols
    _require_cap(r, params)
    rec = reciprocal_basis(L)
    rec_int, d = _scale_to_int(rec)
    kzb, _ = kz_reduce(lattice_basis(rec_int), params)
    red_rec = Matrix([[Rat(x, d) for x in row] for row in kzb.basis.data])
    F = reciprocal_basis(LatticeBasis(red_rec, gram_schmidt(red_rec), RAW))
    out_cols = []
    for col in F.columns():
        icol = []
        for x in col:
            if x.denominator != 1:
                raise ArithmeticError("reciprocal of reduced reciprocal not integral")
            icol.append(int(x.numerator))
        out_cols.append(icol)
    B = L.basis
    gram = B.transpose().mul(B)
    rhs = B.transpose().mul(Matrix.from_cols(out_cols))
    ucols = solve_rational(gram, rhs.columns())
    U = []
    for col in ucols:
        if any(x.denominator != 1 for x in col):
            raise ArithmeticError("transform to RKZ basis is not integral")
        U.append([int(x.numerator) for x in col])
    _normalize_signs(out_cols, U)
    return (lattice_basis(Matrix.from_cols(out_cols), status=RKZ),
            Matrix.from_cols(U))


# -- reducedness checkers (exact) --------------------------------------------

def is_size_reduced(gso: GsoData) -> bool:
    r = gso.mu.rows
    half = Rat(1, 2)
    return all(abs(gso.mu.data[i][j]) <= half
               for i in range(r) for j in range(i))


def is_lll_reduced(M: Matrix, delta=None) -> bool:
    """Exact check of both LLL conditions for the columns of M."""
    delta = Rat(3, 4) if delta is None else Rat(delta)
    gso = gram_schmidt(M)
    if not is_size_reduced(gso):
        return False
    norms = gso.bstar_norms_sq
    for k in range(1, M.cols):
        if norms[k] + gso.mu.data[k][k - 1] ** 2 * norms[k - 1] < delta * norms[k - 1]:
            return False
    return True


def is_kz_reduced(M: Matrix, params: ReductionParams = DEFAULT_PARAMS) -> bool:
    """Exact check: every projected first vector achieves the projected
    lattice minimum (via enumeration) and the basis is size reduced."""
    _require_cap(M.cols, params)
    intM, _ = _scale_to_int(M) if _has_rationals(M) else (M, 1)
    mu, norms, _ = _gso_cols(intM.columns())
    half = Rat(1, 2)
    for i in range(len(norms)):
        for j in range(i):
            if abs(mu[i][j]) > half:
                return False
    for i in range(len(norms)):
        cost, _ = _svp_enum(mu, norms, i)
        if cost != norms[i]:
            return False
    return True


def _has_rationals(M: Matrix) -> bool:
    return any(not isinstance(x, int) and x.denominator != 1
               for row in M.data for x in row)
