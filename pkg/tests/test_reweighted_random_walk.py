"""Tests of bistochastic normalization, the reweighted random walk and discretization."""
import math
import warnings
from unittest import TestCase

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from groupmatch.groupmatch_config.GroupMatch_Config import Discretizer_Type, Matcher_Config
from groupmatch.groupmatch_exceptions import Degenerate_Reweight_Matrix_Exception
from groupmatch.groupmatch_warnings import Bistochastic_Non_Convergence_Warning
from groupmatch.multi_order_matching.Acceptance_Tensor import Acceptance_Tensor
from groupmatch.multi_order_matching.Affinity_Tensor import Affinity_Tensor, Bandwidths
from groupmatch.multi_order_matching.Assignment_State import Assignment_State
from groupmatch.multi_order_matching.Candidate_Index import Candidate_Index
from groupmatch.multi_order_matching.Transition_Tensor import build_transition
from groupmatch.multi_order_matching.discretization import discretize, greedy_mapping, hungarian_mapping
from groupmatch.multi_order_matching.reweighted_random_walk import (balance_log_matrix, bistochastic_normalize, inflate,
                                                                    order_confidence, rrw_iterate)


def _node_only_transition(similarity: np.ndarray, orders=(1, 2, 3)):
    n_p, n_q = similarity.shape
    candidates = Candidate_Index(n_p, n_q)
    affinity = Affinity_Tensor(candidates, {1: (np.arange(candidates.size).reshape(-1, 1), similarity.ravel())}, Bandwidths())
    acceptance = Acceptance_Tensor({1: np.ones(candidates.size), 2: np.zeros(0), 3: np.zeros(0)}, 0.1)
    return build_transition(affinity, acceptance, orders)


class Test_Bistochastic_Normalize(TestCase):

    def test_permutation_is_fixed(self):
        permutation = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        assert np.allclose(bistochastic_normalize(permutation), permutation)

    def test_permutation_is_exact(self):
        permutation = np.eye(5)[[3, 0, 4, 1, 2]]
        assert np.array_equal(bistochastic_normalize(permutation), permutation)

    def test_constant_matrix(self):
        assert np.allclose(bistochastic_normalize(np.ones((4, 4))), np.full((4, 4), 0.25))

    def test_symmetric_matrix(self):
        balanced = bistochastic_normalize(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(balanced, [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]])

    def test_zero_row_raises(self):
        with self.assertRaises(Degenerate_Reweight_Matrix_Exception) as context:
            bistochastic_normalize(np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert context.exception.zero_rows == [0]

    def test_rectangular(self):
        balanced = bistochastic_normalize(np.array([[4.0, 1.0, 1.0], [1.0, 4.0, 1.0]]))
        assert balanced.shape == (2, 3)
        assert np.allclose(balanced.sum(axis=1), 1.0, atol=1e-6)
        assert np.all(balanced.sum(axis=0) <= 1.0 + 1e-6)

    @given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 20)), elements=st.floats(min_value=0.05, max_value=1.0)))
    @settings(max_examples=1000, deadline=None)
    def test_sums(self, matrix):
        balanced = bistochastic_normalize(matrix)
        rows, columns = matrix.shape
        assert np.all(balanced >= 0.0)
        if rows <= columns:
            assert np.all(np.abs(balanced.sum(axis=1) - 1.0) <= 1e-6)
        if columns <= rows:
            assert np.all(np.abs(balanced.sum(axis=0) - 1.0) <= 1e-6)

    @given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 20)), elements=st.floats(min_value=0.0, max_value=1.0)))
    @settings(max_examples=300, deadline=None)
    def test_inflated_sums(self, walk):
        inflated = inflate(walk.ravel(), 30.0).reshape(walk.shape)
        with warnings.catch_warnings():
            warnings.simplefilter("error", Bistochastic_Non_Convergence_Warning)
            balanced = bistochastic_normalize(inflated)
        rows, columns = walk.shape
        if rows <= columns:
            assert np.all(np.abs(balanced.sum(axis=1) - 1.0) <= 1e-6), f"Row sums {balanced.sum(axis=1)}"
        if columns <= rows:
            assert np.all(np.abs(balanced.sum(axis=0) - 1.0) <= 1e-6), f"Column sums {balanced.sum(axis=0)}"

    def test_dominant_entry(self):
        balanced = bistochastic_normalize(np.array([[math.exp(30.0), 1.0], [1.0, 1.0]]))
        off_diagonal = math.exp(-15.0) / (1.0 + math.exp(-15.0))
        assert np.allclose(balanced, [[1.0 - off_diagonal, off_diagonal], [off_diagonal, 1.0 - off_diagonal]], rtol=0.0, atol=1e-8), f"{balanced}"

    def test_log_entries_do_not_overflow(self):
        log_matrix = np.array([[800.0, 0.0, 0.0], [0.0, 700.0, 0.0], [0.0, 0.0, 0.0]])
        balanced, balance = balance_log_matrix(log_matrix)
        assert balance.balances(1e-9), f"Deviation {balance.deviation} after {balance.iterations} steps"
        assert np.all(np.isfinite(balanced))
        assert np.allclose(balanced.sum(axis=1), 1.0) and np.allclose(balanced.sum(axis=0), 1.0)

    def test_warm_start(self):
        rng = np.random.default_rng(4)
        first = 30.0 * rng.uniform(size=(4, 6))
        second = first + rng.normal(scale=0.5, size=first.shape)
        cold, cold_balance = balance_log_matrix(second)
        _, first_balance = balance_log_matrix(first)
        warm, warm_balance = balance_log_matrix(second, start=first_balance)
        assert np.allclose(warm, cold, atol=1e-6)
        print(f"Cold start took {cold_balance.iterations} steps, warm start {warm_balance.iterations}")

    def test_unbalanceable_matrix_warns(self):
        # no positive diagonal passes through the upper right entry
        with self.assertWarns(Bistochastic_Non_Convergence_Warning) as context:
            bistochastic_normalize(np.array([[1.0, 1.0], [0.0, 1.0]]), max_iter=3)
        assert context.warning.iterations == 3
        assert context.warning.deviation >= 1e-9


class Test_Random_Walk(TestCase):

    def test_inflate(self):
        inflated = inflate(np.array([0.0, 0.5, 1.0]), 2.0)
        assert np.allclose(inflated, [1.0, math.e, math.e ** 2])
        assert np.array_equal(inflate(np.zeros(3), 30.0), np.ones(3))

    def test_order_confidence(self):
        jumps = {1: np.array([0.5, 0.5]), 2: np.array([1.0, 0.0])}
        walks = {1: np.array([0.5, 0.5]), 2: np.array([0.0, 1.0])}
        confidence = order_confidence(jumps, walks)
        assert confidence == {1: 1.0, 2: 0.0}
        assert order_confidence({1: np.zeros(2), 2: np.zeros(2)}, walks) == {1: 0.5, 2: 0.5}

    def test_walk_concentrates_on_best_candidates(self):
        similarity = np.array([[0.9, 0.2, 0.1], [0.3, 0.1, 0.8], [0.1, 0.7, 0.2]])
        transition = _node_only_transition(similarity)
        assert transition.layers == (1,)
        state = rrw_iterate(transition, Matcher_Config())
        print(f"Walk finished after {state.iterations} steps, converged {state.converged}")
        assert np.isclose(state.soft[1].sum(), 1.0)
        assert np.array_equal(discretize(state), [[1, 0, 0], [0, 0, 1], [0, 1, 0]])
        assert state.matches() == [(0, 0), (1, 2), (2, 1)]
        assert state.order_confidence[0] == 1.0

    def test_deterministic(self):
        similarity = np.random.default_rng(8).uniform(size=(3, 4))
        first = rrw_iterate(_node_only_transition(similarity))
        second = rrw_iterate(_node_only_transition(similarity))
        assert np.array_equal(first.soft[1], second.soft[1])

    def test_jumps_are_balanced(self):
        rng = np.random.default_rng(12)
        for shape in [(6, 6), (3, 6), (6, 4)]:
            with warnings.catch_warnings():
                warnings.simplefilter("error", Bistochastic_Non_Convergence_Warning)
                state = rrw_iterate(_node_only_transition(rng.uniform(size=shape)))
            assert np.isclose(state.soft[1].sum(), 1.0)

    def test_no_positive_affinity(self):
        state = rrw_iterate(_node_only_transition(np.zeros((2, 2))))
        assert state.converged
        assert np.allclose(state.soft[1], 0.25)

    def test_excluded_order_has_no_layer(self):
        transition = _node_only_transition(np.ones((2, 2)), orders=(2, 3))
        assert transition.layers == ()


class Test_Discretization(TestCase):

    def test_hungarian(self):
        assert np.array_equal(hungarian_mapping(np.array([[0.9, 0.1], [0.2, 0.8]])), np.eye(2))

    def test_rectangular(self):
        mapping = hungarian_mapping(np.array([[0.1, 0.9, 0.3], [0.8, 0.2, 0.4]]))
        assert np.array_equal(mapping, [[0, 1, 0], [1, 0, 0]])
        assert mapping.sum(axis=0).max() == 1 and mapping.sum(axis=1).max() == 1

    def test_greedy_tie_break(self):
        assert np.array_equal(greedy_mapping(np.ones((2, 3))), [[1, 0, 0], [0, 1, 0]])

    def test_greedy_versus_hungarian(self):
        scores = np.array([[0.9, 0.8], [0.85, 0.1]])
        assert np.array_equal(greedy_mapping(scores), [[1, 0], [0, 1]])
        assert np.array_equal(hungarian_mapping(scores), [[0, 1], [1, 0]])

    def test_discretize_uses_integrated_scores(self):
        candidates = Candidate_Index(2, 2)
        state = Assignment_State(candidates, {1: np.array([0.4, 0.1, 0.1, 0.4]), 2: np.array([0.0, 0.45, 0.45, 0.1])})
        assert np.allclose(state.integrated, [[0.4, 0.55], [0.55, 0.5]])
        assert np.array_equal(discretize(state, Discretizer_Type.Greedy), [[0, 1], [1, 0]])
        assert np.array_equal(state.discrete, [[0, 1], [1, 0]])
