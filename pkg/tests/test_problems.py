import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucom2.conditions import UncertainEdgeList
from ucom2.core import clamp, derandomize_entry, oracle_expectation, recompute_ids
from ucom2.data_io import gen_fl_random, gen_mc_random, gen_rc_random
from ucom2.problems import (
    CliqueCoverInstance,
    CoverageInstance,
    FacilityInstance,
    LayeredTreeInstance,
    RobustCliqueInstance,
    RobustColoringInstance,
    RobustDominatingInstance,
    default_config,
    evaluate_discrete,
    solve,
)

from conftest import BINARY_PROBLEMS, CATEGORICAL_PROBLEMS, make_problem, problem_beta, random_state

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
ALL = BINARY_PROBLEMS + CATEGORICAL_PROBLEMS


def _setup(kind, n, seed):
    rng = np.random.default_rng(seed)
    prob = make_problem(kind, n, rng)
    obj = prob.build(problem_beta(prob, rng))
    return prob, obj, random_state(n, rng, prob.arity if prob.categorical else None)


class TestFacility:
    def test_single_node(self):
        inst = FacilityInstance(np.zeros((1, 1)), 1)
        assert inst.build().value(np.array([1.0])) == 0.0

    def test_adjacent_corners(self):
        inst = FacilityInstance.from_points(CORNERS, 2)
        assert inst.evaluate([1, 1, 0, 0]).objective == 2.0

    def test_all_zero_infeasible(self):
        rep = evaluate_discrete(FacilityInstance.from_points(CORNERS, 2), [0, 0, 0, 0])
        assert not rep.feasible and rep.objective == np.inf

    @pytest.mark.parametrize("W", [[[0, 1], [2, 0]], [[0, -1], [-1, 0]], [[1, 1], [1, 0]]])
    def test_matrix_validation(self, W):
        with pytest.raises(ValueError):
            FacilityInstance(np.array(W, dtype=float), 1)

    @pytest.mark.parametrize("k", [0, 5])
    def test_k_range(self, k):
        with pytest.raises(ValueError):
            FacilityInstance.from_points(CORNERS, k)


class TestCoverage:
    def test_example(self):
        inst = CoverageInstance([3.0, 5.0], [[0], [1]], 1)
        assert inst.build(0.0).value(np.array([0.5, 0.5])) == pytest.approx(4.0)

    def test_single_set_covers_all(self):
        inst = CoverageInstance([1.0, 2.0, 3.0], [[0, 1, 2], [0]], 1)
        assert inst.build().terms[0][0].value(np.array([1.0, 0.0])) == 0.0
        assert evaluate_discrete(inst, [1, 0]).objective == 6.0

    def test_complement_identity(self, rng):
        inst = gen_mc_random(12, 30, seed=1, k=3)
        X = np.zeros(12, dtype=int)
        X[rng.choice(12, 3, replace=False)] = 1
        uncovered = inst.build().terms[0][0].value(X.astype(float))
        assert inst.evaluate(X).objective == pytest.approx(inst.weights.sum() - uncovered)

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            CoverageInstance([1.0], [[0], []], 1)


class TestColoring:
    def test_no_soft_edges(self, rng):
        inst = RobustColoringInstance.of(3, [(0, 1)], [1.0], 2)
        soft = inst.build().terms[0][0]
        assert soft.value(random_state(3, rng, 2)) == 0.0

    def test_triangle(self):
        P = 0.4
        inst = RobustColoringInstance.of(3, [(0, 1), (1, 2)], [1.0, P], 2)
        beta = 2.5
        val = inst.build(beta).value(np.full((3, 2), 0.5))
        assert val == pytest.approx(0.5 * beta + 0.5 * -np.log(1 - P))

    def test_proper_coloring(self):
        inst = RobustColoringInstance.of(3, [(0, 1), (1, 2)], [1.0, 1.0], 2)
        hard = inst.build().terms[1][0]
        assert hard.value(np.eye(2)[[0, 1, 0]]) == 0.0

    def test_violation_count(self):
        inst = RobustColoringInstance.of(3, [(0, 1), (1, 2)], [1.0, 1.0], 2)
        rep = inst.evaluate([0, 0, 1])
        assert not rep.feasible and rep.violations["hard"] == 1

    def test_derand_beta_bound(self):
        inst = gen_rc_random(20, 0.3, 0.2, seed=2, c=3)
        assert inst.derand_beta(0.1) > inst.soft_degree().max()
        assert inst.derand_beta(1e9) == 1e9


class TestAppendix:
    def test_rkc_certain_graph(self, rng):
        n = 5
        e = [(i, j) for i in range(n) for j in range(i + 1, n)]
        inst = RobustCliqueInstance(UncertainEdgeList.of(n, e, np.ones(len(e))), 3)
        pc = inst.build()
        assert pc.terms[0][0].value(random_state(n, rng)) == 0.0
        assert pc.terms[1][0].pairs.size == 0

    def test_rds_sure_neighbor(self):
        inst = RobustDominatingInstance(UncertainEdgeList.of(3, [(0, 1), (1, 2)], [1.0, 0.5]), 1)
        rep = inst.evaluate([1, 0, 0])
        assert rep.violations["domination"] == 1
        rep = inst.evaluate([0, 1, 0])
        assert rep.feasible and rep.objective == pytest.approx(0.5)

    def test_cc_exact_partition(self):
        inst = CliqueCoverInstance(4, [(0, 1), (2, 3)], 2)
        X = np.array([0, 0, 1, 1])
        assert inst.build().value(np.eye(2)[X]) == 0.0
        assert inst.evaluate(X).feasible

    def test_mst_path(self):
        inst = LayeredTreeInstance(3, [(0, 1), (1, 2), (0, 2)], [1.0, 2.0, 10.0])
        rep = inst.evaluate([0, 1, 2])
        assert rep.feasible and rep.objective == 3.0
        assert inst.build().value(np.eye(3)[[0, 1, 2]]) == 3.0
        assert not inst.evaluate([0, 0, 1]).feasible

    def test_mst_default_layers(self):
        assert LayeredTreeInstance(4, [(0, 1)], [1.0]).c == 4


@pytest.mark.parametrize("kind", ALL)
@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_oracle(kind, seed):
    prob, obj, p = _setup(kind, 6 if kind in CATEGORICAL_PROBLEMS else 8, seed)
    assert abs(obj.value(p) - oracle_expectation(obj.hat, p)) <= 1e-9 * max(1.0, abs(obj.value(p)))


@pytest.mark.parametrize("kind", ALL)
@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_ids_and_multilinear(kind, seed):
    prob, obj, p = _setup(kind, 25, seed)
    ref = recompute_ids(obj, p)
    assert np.max(np.abs(obj.ids(p) - ref)) <= 1e-9
    f = obj.value(p)
    for i in range(0, 25, 4):
        row = np.array([1 - p[i], p[i]]) if p.ndim == 1 else p[i]
        mix = sum(row[x] * obj.value(derandomize_entry(p, i, x)) for x in range(len(row)))
        assert abs(mix - f) <= 1e-9


@pytest.mark.parametrize("kind", ALL)
def test_decision_validation(kind, rng):
    prob = make_problem(kind, 6, rng)
    with pytest.raises(ValueError):
        prob.evaluate(np.zeros(5, dtype=int))
    with pytest.raises(ValueError):
        prob.evaluate(np.full(6, prob.arity))


class TestSolve:
    def test_fl_feasible(self):
        inst = gen_fl_random(40, seed=0, k=4)
        res = solve(inst, default_config(inst, max_iters=100, restarts=1))
        assert res.report.feasible and res.decision.sum() == 4

    def test_mc_feasible(self):
        inst = gen_mc_random(40, 80, seed=0, k=4)
        res = solve(inst)
        assert res.report.feasible and res.derand_beta >= inst.safe_beta()

    def test_rc_no_hard_violations(self):
        inst = gen_rc_random(30, 0.2, 0.2, seed=0, c=4, require_colorable=True)
        res = solve(inst, default_config(inst, max_iters=150, restarts=2))
        assert res.report.violations["hard"] == 0

    @pytest.mark.parametrize("kind", ("rkc", "rds", "cc", "mst"))
    def test_appendix_runs(self, kind, rng):
        prob = make_problem(kind, 8, rng)
        res = solve(prob, default_config(prob, max_iters=60), seed=0)
        assert res.decision.shape == (8,)
        assert res.trace.final_value <= res.trace.initial_value + 1e-9 * max(1, abs(res.trace.initial_value))

    @pytest.mark.parametrize("method", ("greedy-naive", "iterative", "sample"))
    def test_other_derandomizers(self, method):
        inst = gen_fl_random(15, seed=3, k=3)
        res = solve(inst, default_config(inst, max_iters=50, restarts=1), derand=method, seed=1, samples=20)
        assert res.decision.shape == (15,)

    def test_unknown_derandomizer(self):
        inst = gen_fl_random(5, seed=3, k=2)
        with pytest.raises(ValueError):
            solve(inst, default_config(inst, max_iters=5), derand="beam")

    def test_clamped_start(self):
        inst = gen_fl_random(10, seed=3, k=2)
        res = solve(inst, default_config(inst, max_iters=20, restarts=1))
        assert np.array_equal(clamp(res.optim.best_p), res.optim.best_p)
