"""Rangespace and nullspace reformulations of boxed feasibility systems.

An instance is ``l <= C x <= w`` with a full-column-rank integer constraint
matrix. Instances in the stacked form (A over I) carry a ``split`` marker
``(m, n)``; those are the systems the two reformulations apply to:

* rangespace substitutes x = U y, with U unimodular chosen so that the
  columns of (A; I) U are a reduced basis of the generated lattice;
* nullspace (equality right-hand side only) parametrizes the solutions of
  A x = l1 as x0 + B y with B a reduced basis of the integer kernel lattice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import WrongKind
from .exactmath import (
    Matrix,
    Rat,
    dot,
    gcd_of_maximal_minors,
    gram_schmidt,
    inverse_unimodular,
    inv_rational,
    kernel_basis,
    q_round_half_up,
    rank,
    solve_integral,
)
from .reduction import (
    DEFAULT_PARAMS,
    ReductionParams,
    kz_reduce,
    lattice_basis,
    lll_reduce,
    rkz_reduce,
)

_REDUCERS = {"lll": lll_reduce, "kz": kz_reduce, "rkz": rkz_reduce}


@dataclass
class FeasibilityInstance:
    """l <= constraint @ x <= w with exact integer data.

    ``split = (m, n)`` marks stacked instances whose last n rows are the
    identity; those additionally require w2 > l2 componentwise.
    """

    constraint: Matrix
    lower: list
    upper: list
    split: tuple = None

    def __post_init__(self):
        p, r = self.constraint.rows, self.constraint.cols
        self.lower = [int(x) for x in self.lower]
        self.upper = [int(x) for x in self.upper]
        if len(self.lower) != p or len(self.upper) != p:
            raise ValueError("bound vectors must match the row count")
        if any(l > w for l, w in zip(self.lower, self.upper)):
            raise ValueError("lower bound exceeds upper bound")
        if rank(self.constraint) != r:
            raise ValueError("constraint matrix must have full column rank")
        if self.split is not None:
            m, n = self.split
            if p != m + n or r != n:
                raise ValueError("split inconsistent with matrix shape")
            for i in range(n):
                row = self.constraint.data[m + i]
                if any(row[j] != (1 if j == i else 0) for j in range(n)):
                    raise ValueError("rows m+1..m+n must form the identity")
            if any(self.upper[m + i] <= self.lower[m + i] for i in range(n)):
                raise ValueError("box must satisfy w2 > l2 componentwise")

    @property
    def nvars(self) -> int:
        return self.constraint.cols

    def a_block(self) -> Matrix:
        m, _ = self.split
        return Matrix(self.constraint.data[:m])

    def bounds_norm_sq(self) -> int:
        return sum((w - l) ** 2 for l, w in zip(self.lower, self.upper))

    def contains(self, x) -> bool:
        act = self.constraint.mul_vec(x)
        return all(l <= a <= w for a, l, w in
                   zip(act, self.lower, self.upper))


def from_eq1(A: Matrix, l1, w1, l2, w2) -> FeasibilityInstance:
    """Stack (A; I) with bounds (l1; l2), (w1; w2)."""
    m, n = A.rows, A.cols
    data = [list(row) for row in A.data]
    for i in range(n):
        data.append([1 if j == i else 0 for j in range(n)])
    return FeasibilityInstance(Matrix(data), list(l1) + list(l2),
                               list(w1) + list(w2), split=(m, n))


@dataclass
class Reformulation:
    kind: str                      # "rangespace" | "nullspace"
    instance: FeasibilityInstance  # the reformulated system
    reduction: str                 # "lll" | "kz" | "rkz"
    U: Matrix = None               # rangespace: x = U y
    kernel: Matrix = None          # nullspace: reduced kernel basis B
    x0: list = None                # nullspace: A x0 = l1
    gcd_a: int = None              # nullspace: gcd of maximal minors of A

    def to_original(self, y):
        if self.kind == "rangespace":
            return self.U.mul_vec(list(y))
        return [a + b for a, b in zip(self.x0, self.kernel.mul_vec(list(y)))]

    def from_original(self, x):
        if self.kind == "rangespace":
            return inverse_unimodular(self.U).mul_vec(list(x))
        diff = [a - b for a, b in zip(x, self.x0)]
        K = self.kernel
        gram = K.transpose().mul(K)
        sol = inv_rational(gram).mul_vec(K.transpose().mul_vec(diff))
        out = []
        for v in sol:
            v = Rat(v)
            if v.denominator != 1:
                raise ValueError("point is not in the solution lattice")
            out.append(int(v.numerator))
        return out


def rangespace(inst: FeasibilityInstance, reduction: str = "lll",
               params: ReductionParams = DEFAULT_PARAMS) -> Reformulation:
    """Reduce the columns of the stacked constraint matrix: x = U y keeps
    the bounds and maps integer points of the two systems bijectively."""
    reduce_fn = _REDUCERS[reduction]
    red, U = reduce_fn(lattice_basis(inst.constraint), params)
    new_inst = FeasibilityInstance(red.basis, inst.lower, inst.upper)
    return Reformulation(kind="rangespace", instance=new_inst,
                         reduction=reduction, U=U)


def _babai_reduce(x0, basis: Matrix):
    """Shift x0 by a nearby lattice vector (nearest plane) to shrink it."""
    gso = gram_schmidt(basis)
    y = [Rat(v) for v in x0]
    coeffs = [0] * basis.cols
    for j in range(basis.cols - 1, -1, -1):
        c = dot(y, gso.bstar.col(j)) / gso.bstar_norms_sq[j]
        t = q_round_half_up(c)
        coeffs[j] = t
        if t:
            col = basis.col(j)
            y = [a - t * b for a, b in zip(y, col)]
    return [int(v) for v in y]


def nullspace(inst: FeasibilityInstance, reduction: str = "lll",
              params: ReductionParams = DEFAULT_PARAMS) -> Reformulation:
    """Nullspace reformulation of an equality-form stacked instance.

    Requires w1 == l1. Solutions of A x = l1 are x0 + B y with B a reduced
    basis of the kernel lattice; the box becomes l2 - x0 <= B y <= w2 - x0.

    Raises:
        NoIntegralSolution: when l1 is not attainable; this certifies
            integer infeasibility of the instance.
        RankDeficient: when the rows of A are dependent.
        WrongKind: when the instance is not in equality form.
    """
    if inst.split is None:
        raise WrongKind("nullspace needs a stacked (A; I) instance")
    m, n = inst.split
    l1, w1 = inst.lower[:m], inst.upper[:m]
    if l1 != w1:
        raise WrongKind("nullspace requires w1 == l1")
    A = inst.a_block()
    reduce_fn = _REDUCERS[reduction]
    red, _ = reduce_fn(lattice_basis(kernel_basis(A)), params)
    x0 = _babai_reduce(solve_integral(A, l1), red.basis)
    l2 = [inst.lower[m + i] - x0[i] for i in range(n)]
    w2 = [inst.upper[m + i] - x0[i] for i in range(n)]
    new_inst = FeasibilityInstance(red.basis, l2, w2)
    return Reformulation(kind="nullspace", instance=new_inst,
                         reduction=reduction, kernel=red.basis, x0=x0,
                         gcd_a=gcd_of_maximal_minors(A))


def branching_direction(ref: Reformulation, index: int):
    """Row ``index`` (0-based) of U^-1: branching on y_index in the
    rangespace system equals branching on this direction in the original."""
    if ref.kind != "rangespace":
        raise WrongKind("branching directions come from rangespace U^-1")
    n = ref.U.rows
    if not 0 <= index < n:
        raise ValueError("index out of range")
    return list(inverse_unimodular(ref.U).data[index])


# -- JSON interchange ---------------------------------------------------------

def instance_to_json(inst: FeasibilityInstance) -> str:
    if inst.split is not None:
        m, n = inst.split
        payload = {
            "A": inst.a_block().to_lists(),
            "l1": inst.lower[:m], "w1": inst.upper[:m],
            "l2": inst.lower[m:], "w2": inst.upper[m:],
        }
    else:
        payload = {"B": inst.constraint.to_lists(),
                   "l": list(inst.lower), "w": list(inst.upper)}
    return json.dumps(payload)


def instance_from_json(text: str) -> FeasibilityInstance:
    obj = json.loads(text)
    if "A" in obj:
        return from_eq1(Matrix(obj["A"]), obj["l1"], obj["w1"],
                        obj["l2"], obj["w2"])
    if "B" in obj:
        return FeasibilityInstance(Matrix(obj["B"]), obj["l"], obj["w"])
    if "instance" in obj:  # a reformulation bundle
        return instance_from_json(json.dumps(obj["instance"]))
    raise ValueError("unrecognized instance JSON")


def reformulation_to_json(ref: Reformulation) -> str:
    payload = {
        "kind": ref.kind,
        "reduction": ref.reduction,
        "instance": json.loads(instance_to_json(ref.instance)),
    }
    if ref.U is not None:
        payload["U"] = ref.U.to_lists()
    if ref.kernel is not None:
        payload["kernel"] = ref.kernel.to_lists()
        payload["x0"] = [int(v) for v in ref.x0]
        payload["gcd_A"] = int(ref.gcd_a)
    return json.dumps(payload)
