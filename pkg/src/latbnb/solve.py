"""Exact rational LP over boxed systems and reverse branch-and-bound.

The LP is a bounded-variable primal simplex with Bland's rule on the
equality form  B x - s = 0,  l <= s <= w,  x free: a big-M-free two-phase
scheme whose phase 1 pins violated slack rows at their nearest bound and
drives artificials to zero. Everything runs on exact rationals, so
feasibility, optimality and integer branching ranges carry no tolerances.

Reverse branch-and-bound fixes the last variable first. At a node it
computes the exact LP range [lo, hi] of the next variable and creates one
child per integer in [ceil(lo), floor(hi)]; since coordinate projections of
a nonempty polyhedron are intervals, every created node has a nonempty
relaxation, and a node with all variables fixed is an integral witness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidPermutation
from .exactmath import Rat, q_ceil, q_floor

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

_B, _LO, _UP, _FREE, _DEAD = "B", "L", "U", "F", "X"


@dataclass
class LpResult:
    status: str
    value: Rat = None
    point: list = None


def _simplex_max(rows, lower, upper, objective):
    """Maximize objective over {x : lower <= rows @ x <= upper}.

    Returns (status, value, point with exact rational coordinates).
    """
    p = len(rows)
    r = len(rows[0])
    n0 = r + p  # structural + slack variables

    lo = [None] * r + [Rat(v) for v in lower]
    hi = [None] * r + [Rat(v) for v in upper]
    stat = [_FREE] * r + [None] * p
    val = [Rat(0)] * n0
    basis = [-1] * p
    xb = [Rat(0)] * p

    # Phase-1 start: x = 0, satisfied rows keep s_i basic at 0, violated
    # rows pin s_i at the nearest bound and take a basic artificial.
    art_of_row = {}
    diag = [Rat(-1)] * p
    for i in range(p):
        if lo[r + i] <= 0 <= hi[r + i]:
            stat[r + i] = _B
            basis[i] = r + i
            xb[i] = Rat(0)
        else:
            pin = lo[r + i] if lo[r + i] > 0 else hi[r + i]
            stat[r + i] = _LO if pin == lo[r + i] else _UP
            val[r + i] = pin
            sigma = 1 if pin > 0 else -1
            j = n0 + len(art_of_row)
            art_of_row[i] = j
            basis[i] = j
            xb[i] = abs(pin)
            diag[i] = Rat(sigma)

    nart = len(art_of_row)
    ncols = n0 + nart
    lo += [Rat(0)] * nart
    hi += [None] * nart
    stat += [_B] * nart
    val += [Rat(0)] * nart

    T = []
    for i in range(p):
        mrow = [Rat(x) for x in rows[i]] + [Rat(0)] * (p + nart)
        mrow[r + i] = Rat(-1)
        if i in art_of_row:
            mrow[art_of_row[i]] = diag[i]
        d = diag[i]
        T.append([x / d for x in mrow])

    def pivot(irow, j, newval):
        piv = T[irow][j]
        prow = T[irow] = [x / piv for x in T[irow]]
        for i in range(p):
            if i != irow:
                f = T[i][j]
                if f:
                    row = T[i]
                    T[i] = [a - f * b for a, b in zip(row, prow)]
        basis[irow] = j
        stat[j] = _B
        xb[irow] = newval

    def run(c):
        while True:
            nzrows = [(i, c[basis[i]]) for i in range(p) if c[basis[i]]]
            enter = -1
            dirn = 0
            for j in range(ncols):
                sj = stat[j]
                if sj in (_B, _DEAD):
                    continue
                d = c[j]
                for i, ci in nzrows:
                    tij = T[i][j]
                    if tij:
                        d -= ci * tij
                if sj == _LO and d > 0:
                    enter, dirn = j, 1
                elif sj == _UP and d < 0:
                    enter, dirn = j, -1
                elif sj == _FREE and d != 0:
                    enter, dirn = j, (1 if d > 0 else -1)
                if enter >= 0:
                    break
            if enter < 0:
                return OPTIMAL
            j = enter
            # ratio test: entering's own opposite bound and basic bounds
            best_t = None
            best_var = None
            best_row = -1
            if dirn > 0 and hi[j] is not None:
                best_t, best_var, best_row = hi[j] - val[j], j, -1
            elif dirn < 0 and lo[j] is not None:
                best_t, best_var, best_row = val[j] - lo[j], j, -1
            for i in range(p):
                a = T[i][j] * dirn
                if a > 0:
                    lob = lo[basis[i]]
                    if lob is None:
                        continue
                    t = (xb[i] - lob) / a
                elif a < 0:
                    hib = hi[basis[i]]
                    if hib is None:
                        continue
                    t = (hib - xb[i]) / (-a)
                else:
                    continue
                if (best_t is None or t < best_t
                        or (t == best_t and basis[i] < best_var)):
                    best_t, best_var, best_row = t, basis[i], i
            if best_t is None:
                raise ArithmeticError("unbounded LP on a boxed system")
            t = best_t
            if t:
                step = dirn * t
                for i in range(p):
                    tij = T[i][j]
                    if tij:
                        xb[i] -= step * tij
            if best_row < 0:
                # bound flip, no basis change
                val[j] += dirn * t
                stat[j] = _UP if dirn > 0 else _LO
            else:
                leave = basis[best_row]
                a = T[best_row][j] * dirn
                if leave >= n0:
                    stat[leave] = _DEAD
                else:
                    stat[leave] = _LO if a > 0 else _UP
                    val[leave] = lo[leave] if a > 0 else hi[leave]
                pivot(best_row, j, val[j] + dirn * t)

    if nart:
        c1 = [Rat(0)] * n0 + [Rat(-1)] * nart
        run(c1)
        if any(basis[i] >= n0 and xb[i] != 0 for i in range(p)):
            return INFEASIBLE, None, None
        for i in range(p):
            if basis[i] >= n0:  # degenerate artificial: pivot it out
                jpick = next(jj for jj in range(n0)
                             if stat[jj] != _B and T[i][jj] != 0)
                art = basis[i]
                pivot(i, jpick, val[jpick])
                stat[art] = _DEAD
        for i in range(p):
            T[i] = T[i][:n0]
        ncols = n0

    c2 = [Rat(x) for x in objective] + [Rat(0)] * (ncols - r)
    run(c2)

    point = [Rat(0)] * r
    for i in range(p):
        if basis[i] < r:
            point[basis[i]] = xb[i]
    value = sum((c * x for c, x in zip(c2, point)), Rat(0))
    return OPTIMAL, value, point


def lp_optimize(sense: str, objective, inst) -> LpResult:
    """Exact optimum of <objective, x> over the rational relaxation."""
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    c = list(objective)
    if sense == "min":
        c = [-x for x in c]
    status, value, point = _simplex_max(inst.constraint.data, inst.lower,
                                        inst.upper, c)
    if status == INFEASIBLE:
        return LpResult(status=INFEASIBLE)
    if sense == "min":
        value = -value
    return LpResult(status=OPTIMAL, value=value, point=point)


def width(z, inst):
    """max<z,x> - min<z,x> over the relaxation; None when it is empty."""
    top = lp_optimize("max", z, inst)
    if top.status == INFEASIBLE:
        return None
    bot = lp_optimize("min", z, inst)
    return top.value - bot.value


@dataclass
class BnbReport:
    feasible: bool
    witness: list = None
    nodes_per_level: list = None  # created nodes, indexed by branching depth
    total_nodes: int = 0
    solved_at_root: bool = False
    n_solutions: int = None       # only set by the full-enumeration mode
    order: list = None            # variable branched at each depth

    def finish(self):
        self.total_nodes = sum(self.nodes_per_level)
        self.solved_at_root = all(c <= 1 for c in self.nodes_per_level)
        return self


def _var_range(rows, i, lvec, wvec):
    """Exact range of x_{i-1} over the prefix system; None when empty."""
    if i == 1:
        lo = hi = None
        for j, row in enumerate(rows):
            b = row[0]
            if b == 0:
                if lvec[j] > 0 or wvec[j] < 0:
                    return None
                continue
            if b > 0:
                clo, chi = Rat(lvec[j], b), Rat(wvec[j], b)
            else:
                clo, chi = Rat(wvec[j], b), Rat(lvec[j], b)
            lo = clo if lo is None or clo > lo else lo
            hi = chi if hi is None or chi < hi else hi
        if lo is None or lo > hi:
            return None
        return lo, hi
    sub = [row[:i] for row in rows]
    obj = [0] * i
    obj[i - 1] = 1
    status, vmax, _ = _simplex_max(sub, lvec, wvec, obj)
    if status == INFEASIBLE:
        return None
    _, vmin_neg, _ = _simplex_max(sub, lvec, wvec, [-x for x in obj])
    return -vmin_neg, vmax


def _bnb_core(rows, lower, upper, count_all):
    r = len(rows[0])
    counts = [0] * r
    fixed = [None] * r
    state = {"witness": None, "solutions": 0}

    def rec(i, lvec, wvec):
        if i == 0:
            state["solutions"] += 1
            if state["witness"] is None:
                state["witness"] = list(fixed)
            return not count_all
        rng = _var_range(rows, i, lvec, wvec)
        if rng is None:
            return False
        glo, ghi = q_ceil(rng[0]), q_floor(rng[1])
        depth = r - i
        col = [row[i - 1] for row in rows]
        for g in range(glo, ghi + 1):
            counts[depth] += 1
            fixed[i - 1] = g
            l2 = [a - g * b for a, b in zip(lvec, col)]
            w2 = [a - g * b for a, b in zip(wvec, col)]
            if rec(i - 1, l2, w2):
                return True
        fixed[i - 1] = None
        return False

    rec(r, [Rat(v) for v in lower], [Rat(v) for v in upper])
    return counts, state["witness"], state["solutions"]


def bnb_with_order(inst, order, count_all: bool = False) -> BnbReport:
    """Branch-and-bound branching the variables in the given order.

    ``order[d]`` is the (0-based) variable fixed at depth d. Node counts are
    per depth; for feasible instances in feasibility mode they are the
    counts at termination (the search stops at the first witness).
    """
    r = inst.constraint.cols
    if sorted(order) != list(range(r)):
        raise InvalidPermutation(f"order must be a permutation of 0..{r - 1}")
    perm_cols = [order[r - 1 - j] for j in range(r)]  # branch last column first
    rows = [[row[v] for v in perm_cols] for row in inst.constraint.data]
    counts, wit_perm, nsol = _bnb_core(rows, inst.lower, inst.upper, count_all)
    witness = None
    if wit_perm is not None:
        witness = [0] * r
        for j, v in enumerate(perm_cols):
            witness[v] = wit_perm[j]
    return BnbReport(feasible=wit_perm is not None, witness=witness,
                     nodes_per_level=counts,
                     n_solutions=nsol if count_all else None,
                     order=list(order)).finish()


def reverse_bnb(inst, count_all: bool = False) -> BnbReport:
    """Reverse branch-and-bound: fix x_r first, then x_{r-1}, and so on."""
    r = inst.constraint.cols
    return bnb_with_order(inst, list(range(r - 1, -1, -1)), count_all)
