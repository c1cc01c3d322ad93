"""Brute-force oracles shared by the test modules.

These stay independent of the library code paths they check: plain
enumeration with numpy / python ints.
"""

import itertools
import math

import numpy as np

from latbnb.exactmath import Matrix


def lattice_min_bruteforce(cols, coeff_range):
    """Minimum squared norm over nonzero integer combinations with
    coefficients in [-coeff_range, coeff_range]."""
    B = np.array(cols, dtype=np.int64).T  # rows = ambient dim
    rng = np.arange(-coeff_range, coeff_range + 1)
    grids = np.meshgrid(*[rng] * B.shape[1], indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    U = U[np.any(U != 0, axis=1)]
    V = U @ B.T
    return int(np.min(np.sum(V * V, axis=1)))


def box_integer_points(inst):
    """All integer points of a stacked (A; I) instance, by enumeration."""
    m, n = inst.split
    A = np.array(inst.a_block().data, dtype=np.int64)
    lows = inst.lower[m:]
    highs = inst.upper[m:]
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(lows, highs)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    act = pts @ A.T
    l1 = np.array(inst.lower[:m])
    w1 = np.array(inst.upper[:m])
    keep = np.all((act >= l1) & (act <= w1), axis=1)
    return [tuple(int(v) for v in row) for row in pts[keep]]


def gcd_minors_bruteforce(A: Matrix) -> int:
    m, n = A.rows, A.cols
    g = 0
    for cols in itertools.combinations(range(n), m):
        sub = Matrix([[A.data[i][j] for j in cols] for i in range(m)])
        from latbnb.exactmath import det
        g = math.gcd(g, abs(det(sub)))
    return g


def ball_count_bruteforce(n, k):
    rng = np.arange(-k, k + 1, dtype=np.int64)
    grids = np.meshgrid(*[rng] * n, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return int(np.sum(np.sum(pts * pts, axis=1) <= k * k))


def normalized_column_set(M: Matrix):
    """Columns as sign-normalized tuples (first nonzero entry positive)."""
    out = []
    for col in M.columns():
        lead = next((x for x in col if x != 0), 0)
        if lead < 0:
            col = [-x for x in col]
        out.append(tuple(int(x) for x in col))
    return sorted(out)
