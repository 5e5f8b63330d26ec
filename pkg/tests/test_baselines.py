import itertools

import numpy as np
import pytest

from ucom2.baselines import greedy_fl, greedy_mc, greedy_rd_coloring, random_select
from ucom2.data_io import gen_fl_random, gen_mc_random, gen_rc_random
from ucom2.problems import CoverageInstance, FacilityInstance, RobustColoringInstance

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class TestGreedyFL:
    def test_all_open(self):
        inst = gen_fl_random(7, seed=0, k=7)
        res = greedy_fl(inst)
        assert res.decision.sum() == 7 and res.objective == 0.0

    def test_square(self):
        res = greedy_fl(FacilityInstance.from_points(CORNERS, 2))
        assert res.objective == 2.0 and res.decision.sum() == 2

    def test_one_median(self):
        inst = gen_fl_random(25, seed=4, k=1)
        res = greedy_fl(inst)
        assert res.decision[np.argmin(inst.W.sum(axis=0))] == 1

    def test_size(self):
        res = greedy_fl(gen_fl_random(60, seed=1, k=9))
        assert res.decision.sum() == 9 and res.wall_time >= 0


class TestGreedyMC:
    def test_disjoint_lowest_index(self):
        inst = CoverageInstance(np.ones(6), [[0, 1], [2, 3], [4, 5]], 2)
        assert greedy_mc(inst).decision.tolist() == [1, 1, 0]

    def test_nested(self):
        inst = CoverageInstance(np.ones(4), [[0, 1, 2, 3], [0, 1], [2]], 1)
        res = greedy_mc(inst)
        assert res.decision.tolist() == [1, 0, 0] and res.objective == 4.0

    @pytest.mark.parametrize("seed", range(6))
    def test_approximation_ratio(self, seed):
        inst = gen_mc_random(10, 25, seed=seed, k=3, size_range=(2, 6))
        best = max(inst.covered_weight(np.isin(np.arange(10), s).astype(int))
                   for s in itertools.combinations(range(10), 3))
        assert greedy_mc(inst).objective >= (1 - 1 / np.e) * best


class TestGreedyRD:
    def test_bipartite(self):
        inst = RobustColoringInstance.of(4, [(0, 1), (1, 2), (2, 3)], [1.0, 0.5, 1.0], 2)
        res = greedy_rd_coloring(inst, max_runs=20, seed=0)
        assert inst.evaluate(res.decision).violations["hard"] == 0
        assert res.objective == 0.0

    def test_single_node(self):
        inst = RobustColoringInstance.of(1, np.zeros((0, 2), dtype=int), [], 3)
        res = greedy_rd_coloring(inst, max_runs=1)
        assert res.objective == 0.0 and res.runs == 1

    def test_reproducible(self):
        inst = gen_rc_random(25, 0.3, 0.2, seed=5, c=3)
        a = greedy_rd_coloring(inst, seed=11, max_runs=15)
        b = greedy_rd_coloring(inst, seed=11, max_runs=15)
        assert np.array_equal(a.decision, b.decision) and a.objective == b.objective

    def test_budget_respected(self):
        inst = gen_rc_random(30, 0.3, 0.2, seed=5, c=4)
        res = greedy_rd_coloring(inst, time_budget=0.05, seed=0)
        assert res.runs >= 1 and res.wall_time < 1.0


class TestRandomSelect:
    def test_deterministic(self):
        inst = gen_fl_random(20, seed=2, k=4)
        a = random_select(inst, seed=3, max_draws=10)
        b = random_select(inst, seed=3, max_draws=10)
        assert np.array_equal(a.decision, b.decision)
        assert a.decision.sum() == 4 and a.runs == 10

    def test_full_cardinality(self):
        inst = gen_fl_random(6, seed=2, k=6)
        assert random_select(inst, seed=0, max_draws=1).objective == 0.0

    def test_best_of_draws(self):
        inst = gen_mc_random(15, 40, seed=0, k=3)
        one = random_select(inst, seed=7, max_draws=1).objective
        many = random_select(inst, seed=7, max_draws=50).objective
        assert many >= one

    def test_categorical(self):
        inst = gen_rc_random(12, 0.3, 0.2, seed=0, c=3)
        res = random_select(inst, seed=0, max_draws=5)
        assert res.decision.max() < 3
