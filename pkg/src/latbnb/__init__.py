"""Lattice reformulations of boxed integer feasibility problems.

Rangespace and nullspace reformulations over LLL/KZ/RKZ-reduced bases, an
exact rational LP and reverse branch-and-bound, and the certified node-count,
width and M-threshold bounds that go with them.
"""

from .errors import (
    DependentColumns,
    DimensionCapExceeded,
    InvalidPermutation,
    LatbnbError,
    NegativeInput,
    NoIntegralSolution,
    RankDeficient,
    WrongKind,
)
from .exactmath import (
    GsoData,
    IntMatrix,
    Matrix,
    Rat,
    RatMatrix,
    gcd_of_maximal_minors,
    gram_det,
    gram_schmidt,
    hnf,
    isqrt_floor,
    kernel_basis,
    solve_integral,
)
from .reduction import (
    LatticeBasis,
    ReductionParams,
    is_kz_reduced,
    is_lll_reduced,
    kz_reduce,
    lattice_basis,
    lll_reduce,
    reciprocal_basis,
    rkz_reduce,
    shortest_vector,
)
from .reformulate import (
    FeasibilityInstance,
    Reformulation,
    branching_direction,
    from_eq1,
    instance_from_json,
    instance_to_json,
    nullspace,
    rangespace,
)
from .solve import BnbReport, LpResult, bnb_with_order, lp_optimize, reverse_bnb, width
from .bounds import (
    ThresholdQuery,
    count_ball_points,
    fraction_bound,
    hermite_gamma,
    m_threshold,
    node_count_bound,
    table1,
    width_upper_bound,
)
from .harness import GeneratorSpec, Pipeline, generate, report, run_experiment
