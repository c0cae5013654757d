"""Tests of saliency, purity, LOF stability and node importance."""
import itertools
import math
from unittest import TestCase

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from groupmatch.group_importance.Matching_Set import Matching_Set
from groupmatch.group_importance.importance_scores import (Score_Normalizer, Score_Range, emd, half_up_round, lof, lof_neighborhood,
                                                           lof_scores, node_importance, node_importances, purity_score,
                                                           saliency_score, stability_score)
from groupmatch.groupmatch_exceptions import Empty_Matching_Set_Exception


def _set(owner, members, node: int = 0) -> Matching_Set:
    members = np.asarray(members, dtype=np.float64)
    owner = np.asarray(owner, dtype=np.float64)
    return Matching_Set("A", "g", node, owner, members.reshape(-1, owner.shape[0]))


def _brute_force_emd(a: np.ndarray, b: np.ndarray) -> float:
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    best = math.inf
    for chosen in itertools.permutations(range(len(large)), len(small)):
        best = min(best, sum(float(np.linalg.norm(small[s] - large[c])) for s, c in enumerate(chosen)))
    return best / len(small)


_Hand_Centers = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (10.0, 10.0)])


class Test_Saliency(TestCase):

    def test_identical_members(self):
        assert saliency_score(_set([1.0, 2.0], [[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])) == 0.0

    def test_kth_distance(self):
        ms = _set([0.0], [[4.0], [1.0], [3.0], [2.0]])
        assert saliency_score(ms) == 0.5

    def test_empty_set(self):
        ms = _set([0.0, 0.0], np.zeros((0, 2)))
        assert ms.is_empty
        assert saliency_score(ms) == 1.0

    def test_half_up_round(self):
        assert half_up_round(0.5) == 1
        assert half_up_round(1.5) == 2
        assert half_up_round(2.5) == 3
        assert half_up_round(2.49) == 2


class Test_EMD(TestCase):

    def test_identical_sets(self):
        members = [[0.0, 1.0], [2.0, 3.0], [5.0, 1.0]]
        assert emd(_set([0.0, 0.0], members), _set([0.0, 0.0], list(reversed(members)))) == 0.0

    def test_singletons(self):
        assert math.isclose(emd(_set([0.0, 0.0], [[0.0, 0.0]]), _set([0.0, 0.0], [[3.0, 4.0]])), 5.0)

    def test_empty_set_raises(self):
        with self.assertRaises(Empty_Matching_Set_Exception):
            emd(_set([0.0], np.zeros((0, 1))), _set([0.0], [[1.0]]))

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        for instance in range(500):
            size_a, size_b = rng.integers(1, 5, size=2)
            a, b = rng.normal(size=(size_a, 3)), rng.normal(size=(size_b, 3))
            solved = emd(_set(np.zeros(3), a), _set(np.zeros(3), b))
            expected = _brute_force_emd(a, b)
            assert abs(solved - expected) <= 1e-6, f"instance {instance}: {solved} != {expected}"

    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_non_negative(self, size_a, size_b, seed):
        rng = np.random.default_rng(seed)
        a, b = _set(np.zeros(2), rng.uniform(size=(size_a, 2))), _set(np.zeros(2), rng.uniform(size=(size_b, 2)))
        assert emd(a, b) >= 0.0
        assert math.isclose(emd(a, b), emd(b, a), abs_tol=1e-12)


class Test_Purity(TestCase):

    def test_single_person(self):
        assert purity_score(0, [_set([0.0], [[1.0]])]) == 0.0

    def test_identical_sets(self):
        sets = [_set([0.0], [[1.0], [2.0]], 0), _set([0.0], [[2.0], [1.0]], 1)]
        assert purity_score(0, sets) == 0.0 and purity_score(1, sets) == 0.0

    def test_sum_of_emds(self):
        sets = [_set([0.0], [[0.0]], 0), _set([0.0], [[1.0]], 1), _set([0.0], [[-2.0]], 2)]
        assert math.isclose(emd(sets[0], sets[1]), 1.0)
        assert math.isclose(emd(sets[0], sets[2]), 2.0)
        assert math.isclose(emd(sets[1], sets[2]), 3.0)
        assert math.isclose(purity_score(0, sets), 3.0)

    def test_empty_other_sets_are_skipped(self):
        sets = [_set([0.0], [[0.0]], 0), _set([0.0], np.zeros((0, 1)), 1), _set([0.0], [[2.0]], 2)]
        assert math.isclose(purity_score(0, sets), 2.0)


class Test_LOF(TestCase):

    def test_circle(self):
        angles = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
        circle = np.stack([5.0 * np.cos(angles) + 3.0, 5.0 * np.sin(angles) - 1.0], axis=1)
        scores = lof_scores(circle)
        assert np.all(np.abs(scores - 1.0) <= 1e-9), f"{scores}"
        assert all(abs(stability_score(circle, a) - 1.0) <= 1e-9 for a in range(8))

    def test_hand_computed(self):
        outlier = lof(_Hand_Centers, 3, k=2)
        corner = lof(_Hand_Centers, 0, k=2)
        print(f"LOF of the corner {corner}, of the outlier {outlier}")
        assert abs(corner - (4.0 - 2.0 * math.sqrt(2.0))) <= 1e-9
        assert abs(outlier - 2.0 * (math.sqrt(2.0) - 1.0) * math.sqrt(181.0)) <= 1e-9
        assert outlier > 1.0 and corner < outlier
        assert stability_score(_Hand_Centers, 3, k=2) < 1.0

    def test_dense_member_can_exceed_one(self):
        assert stability_score(_Hand_Centers, 1, k=2) > 1.0

    def test_two_people(self):
        assert lof_neighborhood(2) == 1
        assert np.allclose(lof_scores(np.array([(0.0, 0.0), (4.0, 3.0)])), 1.0)

    def test_default_neighborhood(self):
        assert lof_neighborhood(4) == 2
        assert lof_neighborhood(5) == 3
        assert lof_neighborhood(1) == 1
        assert np.array_equal(lof_scores(_Hand_Centers), lof_scores(_Hand_Centers, k=2))

    def test_coincident_people(self):
        scores = lof_scores(np.array([(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]))
        assert np.array_equal(scores, np.ones(3))
        assert np.array_equal(lof_scores(np.array([(1.0, 1.0), (1.0, 1.0 + 1e-12)]), epsilon=1e-9), np.ones(2))

    def test_pair_standing_together(self):
        scores = lof_scores(np.array([(0.0, 0.0), (0.0, 0.0), (30.0, 40.0)]), k=1)
        assert np.all(np.isfinite(scores)), f"{scores}"
        assert scores[2] > scores[0] and math.isclose(scores[0], scores[1])

    @given(st.floats(min_value=0.1, max_value=50.0), st.floats(min_value=-100.0, max_value=100.0))
    @settings(max_examples=50, deadline=None)
    def test_similarity_invariance(self, scale, shift):
        moved = _Hand_Centers * scale + shift
        assert np.allclose(lof_scores(moved), lof_scores(_Hand_Centers), rtol=1e-6)


class Test_Node_Importance(TestCase):

    def test_extremes(self):
        normalizer = Score_Normalizer(Score_Range(0.0, 2.0), Score_Range(1.0, 3.0), Score_Range(0.5, 1.5))
        assert node_importance(2.0, 3.0, 1.5, normalizer) == 3.0
        assert node_importance(0.0, 1.0, 0.5, normalizer) == 0.0
        assert node_importance(1.0, 2.0, 1.0, normalizer) == 1.5

    def test_single_value_range(self):
        assert Score_Range.of([0.7]).normalize(0.7) == 1.0

    def test_single_person_group(self):
        importances = node_importances(np.array([(5.0, 5.0)]), [_set([0.0], [[1.0]])])
        assert np.array_equal(importances, [3.0])

    def test_empty_sets_take_the_group_maximum(self):
        centers = np.array([(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)])
        sets = [_set([0.0], [[1.0], [3.0]], 0), _set([0.0], np.zeros((0, 1)), 1), _set([0.0], [[0.2], [0.1]], 2)]
        importances = node_importances(centers, sets)
        print(importances)
        assert importances.shape == (3,)
        assert np.all(importances >= 0.0) and np.all(importances <= 3.0)
        assert importances[1] >= importances[2]

    def test_affine_rescaling_of_a_score(self):
        low, high = [0.2, 0.9, 0.5], [2.0 * v + 1.0 for v in [0.2, 0.9, 0.5]]
        fixed = Score_Range(0.0, 1.0)
        for a, b in zip(low, high):
            assert math.isclose(node_importance(a, 0.5, 0.5, Score_Normalizer(Score_Range.of(low), fixed, fixed)),
                                node_importance(b, 0.5, 0.5, Score_Normalizer(Score_Range.of(high), fixed, fixed)))
