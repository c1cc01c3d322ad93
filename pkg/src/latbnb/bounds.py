"""Closed-form and combinatorial bounds: Hermite constants, lattice point
counts, node-count and width bounds, and the M-threshold calculator.

Certified outputs never go through floating point. Fractional powers are
enclosed between rationals obtained from integer k-th roots, and inequalities
involving them are decided after raising both sides to integer powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2

from .errors import NegativeInput
from .exactmath import Rat, gram_det, isqrt_floor, q_ceil

# 100 decimals of pi; enough for every enclosure this package needs.
_PI_100 = ("3."
           "1415926535897932384626433832795028841971693993751"
           "058209749445923078164062862089986280348253421170679")


def _pi_bounds(digits: int):
    digits = min(digits, 100)
    s = _PI_100.replace(".", "")[: digits + 1]
    lo = Rat(int(s), 10 ** digits)
    return lo, lo + Rat(1, 10 ** digits)


def _root_bounds(num: int, den: int, e: int, digits: int):
    """Rational enclosure of (num/den)**(1/e) for nonnegative num."""
    if num < 0:
        raise NegativeInput("root of a negative number")
    scale = 10 ** digits
    p = num * den ** (e - 1) * scale ** e
    t = int(gmpy2.iroot(p, e)[0])
    return Rat(t, den * scale), Rat(t + 1, den * scale)


def _iv_root(iv, e: int, digits: int):
    lo = _root_bounds(int(iv[0].numerator), int(iv[0].denominator), e, digits)[0]
    hi = _root_bounds(int(iv[1].numerator), int(iv[1].denominator), e, digits)[1]
    return lo, hi


def _iv_mul(a, b):
    return a[0] * b[0], a[1] * b[1]


def _iv_div(a, b):
    return a[0] / b[1], a[1] / b[0]


def _blichfeldt_bounds(i: int, digits: int):
    """Enclosure of the Hermite-constant upper bound (2/pi)*Gamma((i+4)/2)^(2/i)."""
    pi = _pi_bounds(digits)
    two = (Rat(2), Rat(2))
    if i % 2 == 0:
        g = math.factorial((i + 4) // 2 - 1)
        root = _root_bounds(g * g, 1, i, digits)
    else:
        h = (i + 3) // 2
        c = Rat(math.factorial(2 * h), 4 ** h * math.factorial(h))
        inner = _iv_mul((c * c, c * c), pi)
        root = _iv_root(inner, i, digits)
    return _iv_div(_iv_mul(two, root), pi)


def _gamma_bounds(i: int, digits: int):
    """Enclosure of max over j<=i of the Blichfeldt bounds (upper-bounds gamma_i)."""
    lo = hi = None
    for j in range(1, i + 1):
        bj = _blichfeldt_bounds(j, digits)
        if lo is None or bj[0] > lo:
            lo = bj[0]
        if hi is None or bj[1] > hi:
            hi = bj[1]
    return lo, hi


@dataclass
class HermiteBound:
    i: int
    value: Rat
    method: str  # "linear" | "blichfeldt"


_GAMMA_GRID = 10 ** 9


def hermite_gamma(i: int, method: str = "blichfeldt"):
    """Certified rational upper bound on gamma_i = max(C_1..C_i).

    ``linear`` gives 1 + i/4; ``blichfeldt`` evaluates the Gamma-function
    bound and rounds it up to a 1e-9 grid.
    """
    if i < 1:
        raise ValueError("dimension must be positive")
    if method == "linear":
        return Rat(4 + i, 4)
    if method != "blichfeldt":
        raise ValueError(f"unknown method {method!r}")
    _, hi = _gamma_bounds(i, digits=40)
    return Rat(q_ceil(hi * _GAMMA_GRID), _GAMMA_GRID)


def hermite_bound(i: int, method: str = "blichfeldt") -> HermiteBound:
    return HermiteBound(i=i, value=hermite_gamma(i, method), method=method)


def ball_radius_k(gamma_dim: int, box_norm_sq: int) -> int:
    """Certified ceil(gamma_{gamma_dim} * sqrt(box_norm_sq)), Blichfeldt gamma."""
    if box_norm_sq < 0:
        raise NegativeInput("negative squared norm")
    for digits in (30, 60, 90):
        g = _gamma_bounds(gamma_dim, digits)
        s = _root_bounds(box_norm_sq, 1, 2, digits)
        lo, hi = _iv_mul(g, s)
        if q_ceil(lo) == q_ceil(hi):
            return q_ceil(lo)
    raise ArithmeticError("enclosure did not separate an integer boundary")


def count_ball_points(n: int, k: int) -> int:
    """Exact number of integer points v in Z^n with ||v||^2 <= k^2.

    Dynamic program over dimensions and the squared-norm budget.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if k < 0:
        raise NegativeInput("negative radius")
    k2 = k * k
    ways = [0] * (k2 + 1)
    ways[0] = 1
    for _ in range(n):
        new = list(ways)
        for t in range(1, k + 1):
            tt = t * t
            if tt > k2:
                break
            for s in range(tt, k2 + 1):
                new[s] += 2 * ways[s - tt]
        ways = new
    return sum(ways)


def fraction_bound(n: int, m: int, M: int, k: int, which: str):
    """Upper bound on the fraction of matrices whose lattice has a vector
    of norm at most k.

    ``which='R'`` bounds the stacked-lattice fraction by (2k+1)^(n+m) / M^m;
    ``which='N'`` bounds the kernel-lattice fraction by (2k+1)^n / (M^m chi)
    with chi replaced by its 1/2 lower bound.
    """
    if k < 1 or M < 1:
        raise ValueError("k and M must be positive")
    if which == "R":
        return Rat((2 * k + 1) ** (n + m), M ** m)
    if which == "N":
        return Rat(2 * (2 * k + 1) ** n, M ** m)
    raise ValueError(f"which must be 'R' or 'N', got {which!r}")


def node_count_bound(gso, norm_sq_wl, level: int) -> int:
    """Upper bound on reverse-B&B nodes at the level of variable ``level``
    (0-based): prod over j >= level of (floor(||w-l|| / ||b_j*||) + 1).
    """
    norms = gso.bstar_norms_sq
    if not 0 <= level < len(norms):
        raise ValueError("level out of range")
    out = 1
    for j in range(level, len(norms)):
        out *= isqrt_floor(Rat(norm_sq_wl) / norms[j]) + 1
    return out


def node_count_bounds_all(gso, norm_sq_wl):
    """node_count_bound for every level, cheapest-first evaluation."""
    norms = gso.bstar_norms_sq
    r = len(norms)
    out = [1] * r
    acc = 1
    for j in range(r - 1, -1, -1):
        acc *= isqrt_floor(Rat(norm_sq_wl) / norms[j]) + 1
        out[j] = acc
    return out


def _bounds_norm_sq(inst) -> int:
    return sum((int(w) - int(l)) ** 2 for l, w in zip(inst.lower, inst.upper))


def _width_bound_data(ref):
    """(r, s, D, g) for the width bound: dimension, ||w-l||^2, the squared
    lattice determinant and the gcd factor."""
    inst = ref.instance
    s = _bounds_norm_sq(inst)
    r = inst.constraint.cols
    if ref.kind == "rangespace":
        return r, s, gram_det(inst.constraint), 1
    if ref.kind == "nullspace":
        g = ref.gcd_a
        return r, s, g * g * gram_det(ref.kernel), g
    raise ValueError(f"unknown reformulation kind {ref.kind!r}")


def width_upper_bound(ref):
    """Certified rational upper bound on width(e_r, .) of a reformulation.

    RKZ gives sqrt(r)*||w-l|| / det^(1/(2r)); LLL replaces sqrt(r) with
    2^((r-1)/4). KZ-reduced bases are LLL-reduced, so KZ uses the LLL form.
    """
    r, s, D, g = _width_bound_data(ref)
    digits = 40
    if ref.reduction == "rkz":
        num_hi = _root_bounds(r * s, 1, 2, digits)[1]
    else:
        num_hi = _iv_mul(_root_bounds(2 ** (r - 1), 1, 4, digits),
                         _root_bounds(s, 1, 2, digits))[1]
    den_lo = _root_bounds(D, 1, 2 * r, digits)[0]
    return g * num_hi / den_lo


def width_bound_holds(ref, width_value) -> bool:
    """Exact check width <= bound, done on integer powers of both sides."""
    r, s, D, g = _width_bound_data(ref)
    if width_value < 0:
        raise NegativeInput("negative width")
    lhs = Rat(width_value) ** (4 * r) * D
    if ref.reduction == "rkz":
        rhs = Rat(g) ** (4 * r) * Rat(r) ** (2 * r) * Rat(s) ** (2 * r)
    else:
        rhs = Rat(g) ** (4 * r) * Rat(2) ** (r * (r - 1)) * Rat(s) ** (2 * r)
    return lhs <= rhs


@dataclass
class ThresholdQuery:
    """Inputs for the minimal-M calculators.

    ``norm_sq_bound`` is ||w2 - l2||^2 for the nullspace variants and
    ||(w1;w2) - (l1;l2)||^2 for the rangespace ones. ``chi_exponent``
    selects how the 1/2 lower bound on the independent-rows fraction enters
    the table formula: 'inv_m' divides by chi^(1/m) (the reading that
    reproduces the reference table and is therefore the default), 'one'
    divides by chi itself.
    """

    n: int
    m: int
    norm_sq_bound: int
    epsilon: Rat = field(default_factory=lambda: Rat(1, 10))
    variant: str = "table_actual"
    chi_exponent: str = "inv_m"

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise ValueError("need 1 <= m < n")
        self.epsilon = Rat(self.epsilon)
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")


def _least_power_exceeder(value, a: int) -> int:
    """Minimal positive integer M with M**a > value."""
    v = Rat(value)
    if v < 0:
        return 1
    t = int(gmpy2.iroot(int(v.numerator // v.denominator), a)[0])
    while Rat(t) ** a <= v:
        t += 1
    return max(t, 1)


def m_threshold(q: ThresholdQuery) -> int:
    """Minimal integer M certified by the selected formula."""
    n, m, s = q.n, q.m, q.norm_sq_bound
    if q.variant == "table_actual":
        k = ball_radius_k(n - m, s)
        N = count_ball_points(n, k)
        if q.chi_exponent == "inv_m":
            return _least_power_exceeder(Rat(2 * N) / q.epsilon, m)
        if q.chi_exponent == "one":
            return _least_power_exceeder(Rat(2 ** m * N) / q.epsilon, m)
        raise ValueError(f"unknown chi_exponent {q.chi_exponent!r}")
    if q.variant == "rkz_range":
        return _least_power_exceeder((2 * n) ** (2 * (n + m)) * Rat(s) ** (n + m),
                                     2 * m)
    if q.variant == "rkz_null":
        return _least_power_exceeder((12 * (n - m)) ** (2 * n) * Rat(s) ** n,
                                     2 * m)
    if q.variant == "lll_range":
        return _least_power_exceeder(Rat(2) ** ((n + 4) * (n + m)) * Rat(s) ** (n + m),
                                     2 * m)
    if q.variant == "lll_null":
        return _least_power_exceeder(Rat(2) ** ((n - m + 4) * n) * Rat(s) ** n,
                                     2 * m)
    raise ValueError(f"unknown variant {q.variant!r}")


TABLE1_ROWS = ((30, 20), (50, 20), (50, 30), (60, 30), (70, 40))


def table1(chi_exponent: str = "inv_m"):
    """Minimal M for the five (n, m) rows at 90% and 99%, binary boxes.

    Returns a list of dicts with the row data, the certified ball radius k
    and the exact point count backing each threshold.
    """
    out = []
    for n, m in TABLE1_ROWS:
        k = ball_radius_k(n - m, n)
        N = count_ball_points(n, k)
        row = {"n": n, "m": m, "k": k, "ball_points": N}
        for label, eps in (("m_90", Rat(1, 10)), ("m_99", Rat(1, 100))):
            row[label] = m_threshold(ThresholdQuery(
                n=n, m=m, norm_sq_bound=n, epsilon=eps,
                variant="table_actual", chi_exponent=chi_exponent))
        out.append(row)
    return out
