import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucom2.core import as_state, derandomize_entry, discrete_mask
from ucom2.derand import (
    DerandError,
    greedy_derandomize,
    greedy_derandomize_naive,
    iterative_rounding,
    sample_derandomize,
)
from ucom2.problems import FacilityInstance
from ucom2.verify import greedy_guarantees

from conftest import BINARY_PROBLEMS, CATEGORICAL_PROBLEMS, make_problem, problem_beta, random_state

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def _setup(kind, n, seed):
    rng = np.random.default_rng(seed)
    prob = make_problem(kind, n, rng)
    obj = prob.build(problem_beta(prob, rng))
    return prob, obj, random_state(n, rng, prob.arity if prob.categorical else None)


def test_discrete_start_is_fixed_point():
    obj = FacilityInstance.from_points(CORNERS, 2).build(1.0)
    p0 = np.array([1.0, 0.0, 1.0, 0.0])
    for tr in (greedy_derandomize(obj, p0), iterative_rounding(obj, p0)):
        assert tr.steps == []
        assert tr.final.tolist() == [1, 0, 1, 0]


def test_square_reaches_optimum():
    # Every pair of corners leaves each other corner one unit away, so all
    # six pairs cost 2 and the tie-break decides which pair is returned.
    inst = FacilityInstance.from_points(CORNERS, 2)
    costs = {s: inst.cost(np.isin(np.arange(4), s).astype(int)) for s in itertools.combinations(range(4), 2)}
    assert set(costs.values()) == {2.0}
    tr = greedy_derandomize(inst.build(1.0), np.full(4, 0.5))
    assert tr.final.sum() == 2
    assert inst.cost(tr.final) == 2.0


def test_single_node_one_step():
    obj = FacilityInstance(np.zeros((1, 1)), 1).build(1.0)
    for engine in (greedy_derandomize, greedy_derandomize_naive):
        tr = engine(obj, np.array([0.5]), polish=False)
        assert len(tr.steps) == 1
        assert tr.final.tolist() == [1]


@pytest.mark.parametrize("kind", BINARY_PROBLEMS + CATEGORICAL_PROBLEMS)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_guarantees(kind, seed):
    _, obj, p0 = _setup(kind, 12, seed)
    g1, g2, g3, _ = greedy_guarantees(obj, p0)
    assert g1 and g2 and g3


@pytest.mark.parametrize("kind", BINARY_PROBLEMS + CATEGORICAL_PROBLEMS)
@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_naive_twin_same_steps(kind, seed):
    _, obj, p0 = _setup(kind, 10, seed)
    a = greedy_derandomize(obj, p0)
    b = greedy_derandomize_naive(obj, p0)
    assert [s[:2] for s in a.steps] == [s[:2] for s in b.steps]
    assert np.array_equal(a.final, b.final)


@pytest.mark.parametrize("kind", BINARY_PROBLEMS + CATEGORICAL_PROBLEMS)
@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_paths_non_increasing(kind, seed):
    _, obj, p0 = _setup(kind, 12, seed)
    f0 = obj.value(p0)
    for tr in (greedy_derandomize(obj, p0), iterative_rounding(obj, p0)):
        path = [f0] + tr.objective_path
        assert all(b <= a + 1e-9 * max(1, abs(a)) for a, b in zip(path, path[1:]))
        assert tr.final_value <= f0 + 1e-9 * max(1, abs(f0))
        assert abs(tr.objective_path[-1] - tr.final_value) <= 1e-9 * max(1, abs(f0))


def test_trace_path_matches_recomputation(rng):
    prob = make_problem("fl", 20, rng)
    obj = prob.build(0.5)
    p = random_state(20, rng)
    tr = greedy_derandomize(obj, p, polish=False)
    for (i, x, _), f in zip(tr.steps, tr.objective_path):
        p = derandomize_entry(p, i, x)
        assert f == pytest.approx(obj.value(p), abs=1e-9)


def test_polish_off_stops_at_discrete(rng):
    prob = make_problem("rc", 15, rng)
    obj = prob.build()
    tr = greedy_derandomize(obj, random_state(15, rng, prob.arity), polish=False)
    assert tr.polish_steps == 0
    assert len(tr.steps) == 15


def test_iterative_order_respected(rng):
    prob = make_problem("fl", 8, rng)
    obj = prob.build(0.5)
    order = rng.permutation(8)
    tr = iterative_rounding(obj, random_state(8, rng), order)
    assert [s[0] for s in tr.steps] == order.tolist()
    assert discrete_mask(as_state(tr.final)).all()


def test_iterative_bad_order(rng):
    obj = make_problem("fl", 4, rng).build(0.5)
    with pytest.raises(ValueError):
        iterative_rounding(obj, np.full(4, 0.5), [0, 0, 1, 2])


class TestSampling:
    def test_point_mass(self, rng):
        obj = make_problem("fl", 6, rng).build(0.5)
        p0 = np.array([1.0, 0, 0, 1.0, 0, 0])
        for seed in range(3):
            assert sample_derandomize(obj, p0, 5, seed).final.tolist() == [1, 0, 0, 1, 0, 0]

    def test_converges_to_minimum(self, rng):
        prob = make_problem("fl", 8, rng)
        obj = prob.build(1.0)
        best = min(obj.hat(np.array(X)) for X in itertools.product((0, 1), repeat=8))
        tr = sample_derandomize(obj, np.full(8, 0.5), 4000, seed=1)
        assert obj.hat(tr.final) == pytest.approx(best)

    def test_seed_determinism(self, rng):
        prob = make_problem("rc", 10, rng)
        obj = prob.build()
        p = random_state(10, rng, prob.arity)
        a = sample_derandomize(obj, p, 30, seed=9)
        b = sample_derandomize(obj, p, 30, seed=9)
        assert np.array_equal(a.final, b.final)
        assert a.objective_path == b.objective_path

    def test_best_so_far_path(self, rng):
        obj = make_problem("mc", 10, rng).build(2.0)
        tr = sample_derandomize(obj, np.full(10, 0.3), 50, seed=0)
        assert all(b <= a for a, b in zip(tr.objective_path, tr.objective_path[1:]))
        assert obj.hat(tr.final) == tr.objective_path[-1]

    def test_two_group_categorical(self, rng):
        prob = make_problem("cc", 6, rng, c=2)
        obj = prob.build()
        tr = sample_derandomize(obj, random_state(6, rng, 2), 20, seed=0)
        assert tr.final.shape == (6,)

    def test_needs_samples(self, rng):
        with pytest.raises(ValueError):
            sample_derandomize(make_problem("fl", 4, rng).build(1.0), np.full(4, 0.5), 0)


def test_non_finite_ids_raise(rng):
    prob = make_problem("fl", 5, rng)
    obj = prob.build(1.0)
    obj.ids = lambda p: np.full((5, 2), np.nan)
    obj.tracker = lambda p: type("T", (), {"p": np.array(p), "value": lambda s: 0.0,
                                          "ids": lambda s: np.full((5, 2), np.nan)})()
    with pytest.raises(DerandError):
        greedy_derandomize(obj, np.full(5, 0.5))

