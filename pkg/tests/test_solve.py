import numpy as np
import pytest
from scipy.optimize import linprog

from latbnb.errors import InvalidPermutation
from latbnb.exactmath import Matrix, Rat, gram_schmidt
from latbnb.reformulate import FeasibilityInstance, from_eq1, rangespace
from latbnb.solve import (
    INFEASIBLE,
    OPTIMAL,
    bnb_with_order,
    lp_optimize,
    reverse_bnb,
    width,
)
from helpers import box_integer_points

EX1 = from_eq1(Matrix([[41, 38]]), [207], [217], [0, 0], [10, 10])
EX1_RANGE = rangespace(EX1, "lll").instance


def random_instance(rng, m, n, box_hi=6, M=9):
    A = Matrix(rng.integers(1, M + 1, size=(m, n)).tolist())
    w2 = [int(v) for v in rng.integers(1, box_hi + 1, size=n)]
    top = A.mul_vec(w2)
    b = [int(rng.integers(0, t + 1)) for t in top]
    l1 = [v - int(rng.integers(0, 3)) for v in b]
    return from_eq1(A, l1, b, [0] * n, w2)


class TestLp:
    def test_knapsack_extremes(self):
        top = lp_optimize("max", [0, 1], EX1)
        assert top.status == OPTIMAL and top.value == Rat(217, 38)
        assert top.point == [0, Rat(217, 38)]
        bot = lp_optimize("min", [0, 1], EX1)
        assert bot.value == 0

    def test_degenerate_origin(self):
        inst = FeasibilityInstance(Matrix.identity(3), [0, 0, 0], [0, 0, 0])
        res = lp_optimize("max", [1, 0, 0], inst)
        assert res.value == 0 and res.point == [0, 0, 0]

    def test_point_satisfies_constraints_exactly(self):
        rng = np.random.default_rng(67)
        for _ in range(12):
            inst = random_instance(rng, 2, 3)
            c = [int(v) for v in rng.integers(-3, 4, size=3)]
            res = lp_optimize("max", c, inst)
            if res.status == OPTIMAL:
                acts = inst.constraint.mul_vec(res.point)
                assert all(l <= a <= w for a, l, w in
                           zip(acts, inst.lower, inst.upper))

    def test_determinism(self):
        res1 = lp_optimize("max", [1, -1], EX1)
        res2 = lp_optimize("max", [1, -1], EX1)
        assert res1.value == res2.value and res1.point == res2.point

    def test_against_scipy(self):
        rng = np.random.default_rng(71)
        agree_feasible = 0
        for _ in range(25):
            inst = random_instance(rng, int(rng.integers(1, 3)), int(rng.integers(2, 5)))
            c = [int(v) for v in rng.integers(-4, 5, size=inst.nvars)]
            A = np.array(inst.constraint.data, dtype=float)
            res = linprog(c=-np.array(c, dtype=float),
                          A_ub=np.vstack([A, -A]),
                          b_ub=np.concatenate([np.array(inst.upper, float),
                                               -np.array(inst.lower, float)]),
                          bounds=[(None, None)] * inst.nvars,
                          method="highs")
            mine = lp_optimize("max", c, inst)
            if mine.status == INFEASIBLE:
                assert not res.success
            else:
                assert res.success
                agree_feasible += 1
                assert abs(float(mine.value) - (-res.fun)) < 1e-6
        assert agree_feasible >= 5  # the sampler must exercise both paths


class TestWidth:
    def test_examples(self):
        assert width([0, 1], EX1) == Rat(217, 38)
        assert width([0, 1], EX1_RANGE) == Rat(1031, 1558)
        assert width([0, 0], EX1) == 0

    def test_infeasible_region(self):
        inst = FeasibilityInstance(Matrix([[1, 0], [0, 1], [1, 1]]),
                                   [0, 0, 3], [1, 1, 3])
        assert width([1, 0], inst) is None


class TestReverseBnb:
    def test_knapsack_original_six_nodes(self):
        rep = reverse_bnb(EX1)
        assert not rep.feasible
        assert rep.nodes_per_level == [6, 0]
        assert rep.total_nodes == 6
        assert not rep.solved_at_root

    def test_knapsack_reformulated_root(self):
        rep = reverse_bnb(EX1_RANGE)
        assert not rep.feasible
        assert rep.nodes_per_level == [0, 0]
        assert rep.total_nodes == 0
        assert rep.solved_at_root

    def test_singleton_box(self):
        inst = FeasibilityInstance(Matrix.identity(3), [0] * 3, [0] * 3)
        rep = reverse_bnb(inst)
        assert rep.feasible and rep.witness == [0, 0, 0]
        assert rep.nodes_per_level == [1, 1, 1]
        assert rep.solved_at_root


class TestBnbWithOrder:
    def test_reverse_order_matches(self):
        rep1 = bnb_with_order(EX1, [1, 0])
        rep2 = reverse_bnb(EX1)
        assert rep1.nodes_per_level == rep2.nodes_per_level
        assert rep1.feasible == rep2.feasible

    def test_first_variable_first(self):
        rep = bnb_with_order(EX1, [0, 1])
        assert rep.nodes_per_level[0] == 6

    def test_invalid_permutation(self):
        with pytest.raises(InvalidPermutation):
            bnb_with_order(EX1, [0, 0])

    def test_singleton_any_order(self):
        inst = FeasibilityInstance(Matrix.identity(3), [1, 2, 3], [1, 2, 3])
        for order in ([0, 1, 2], [2, 0, 1]):
            rep = bnb_with_order(inst, order)
            assert rep.feasible and rep.witness == [1, 2, 3]
            assert rep.nodes_per_level == [1, 1, 1]


class TestSoundness:
    def test_matches_bruteforce(self):
        rng = np.random.default_rng(73)
        for _ in range(20):
            inst = random_instance(rng, int(rng.integers(1, 3)),
                                   int(rng.integers(2, 5)), box_hi=4)
            points = box_integer_points(inst)
            rep = reverse_bnb(inst, count_all=True)
            assert rep.feasible == (len(points) > 0)
            assert rep.n_solutions == len(points)
            if rep.feasible:
                assert inst.contains(rep.witness)
                assert tuple(rep.witness) in set(points)

    def test_level_counts_respect_gso_bound(self):
        from latbnb.bounds import node_count_bounds_all
        rng = np.random.default_rng(79)
        for _ in range(10):
            inst = random_instance(rng, 1, 3, box_hi=5)
            rep = reverse_bnb(inst, count_all=True)
            gso = gram_schmidt(inst.constraint)
            per_var = node_count_bounds_all(gso, inst.bounds_norm_sq())
            r = inst.nvars
            for depth, count in enumerate(rep.nodes_per_level):
                assert count <= per_var[r - 1 - depth]

    def test_width_vs_last_gso_norm(self):
        # width(e_r, P) <= ||w - l|| / ||b_r*||, compared on squares
        for inst in (EX1, EX1_RANGE):
            gso = gram_schmidt(inst.constraint)
            w = width([0, 1], inst)
            s = inst.bounds_norm_sq()
            assert w * w * gso.bstar_norms_sq[-1] <= s

    def test_reformulation_equivalence(self):
        rng = np.random.default_rng(83)
        from latbnb.reformulate import nullspace
        for _ in range(8):
            inst = random_instance(rng, 1, 3, box_hi=4)
            eq = from_eq1(inst.a_block(), inst.upper[:1], inst.upper[:1],
                          inst.lower[1:], inst.upper[1:])
            verdicts = [reverse_bnb(eq).feasible]
            verdicts.append(reverse_bnb(rangespace(eq, "lll").instance).feasible)
            try:
                verdicts.append(reverse_bnb(nullspace(eq, "lll").instance).feasible)
            except Exception:
                verdicts.append(False)
            assert len(set(verdicts)) == 1
