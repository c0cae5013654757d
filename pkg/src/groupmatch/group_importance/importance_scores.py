"""Saliency, purity and stability of individual people and their combination into a node importance."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from sklearn.neighbors import LocalOutlierFactor

from groupmatch.group_importance.Matching_Set import Matching_Set
from groupmatch.groupmatch_config.GroupMatch_Config import Importance_Config
from groupmatch.groupmatch_exceptions import Empty_Matching_Set_Exception


def half_up_round(value: float) -> int:
    """
    :param value: Non-negative value.
    :return: The value rounded to the nearest integer with halves rounded up.
    """
    return int(math.floor(value + 0.5))


def saliency_score(ms: Matching_Set, empty_value: float = 1.0) -> float:
    """
    :param ms: Matching set of a person.
    :param empty_value: Score of an empty set.
    :return: Distance from the owner to its k-th nearest member divided by the set size, k = round(|ms| / 2).
    """
    if ms.is_empty:
        return empty_value
    distances = np.sort(np.linalg.norm(ms.members - ms.owner_descriptor, axis=1))
    k = min(max(half_up_round(len(ms) / 2.0), 1), len(ms))
    return float(distances[k - 1] / len(ms))


def emd(ms_a: Matching_Set, ms_b: Matching_Set) -> float:
    """
    Earth mover's distance between two matching sets with unit mass per member and total flow min(|A|, |B|).
    The flow polytope has integral vertices, so the optimum is an optimal partial assignment.
    :param ms_a: First matching set.
    :param ms_b: Second matching set.
    :return: Total cost of the optimal flow divided by the total flow.
    """
    if ms_a.is_empty:
        raise Empty_Matching_Set_Exception(ms_a.owner)
    if ms_b.is_empty:
        raise Empty_Matching_Set_Exception(ms_b.owner)
    costs = cdist(ms_a.members, ms_b.members)
    rows, columns = linear_sum_assignment(costs)
    return float(costs[rows, columns].sum() / min(len(ms_a), len(ms_b)))


def purity_score(target: int, matching_sets: list[Matching_Set]) -> float:
    """
    :param target: Index of the person within its group.
    :param matching_sets: Matching sets of every person in the group, in node order.
    :return: Sum of EMDs between the target's matching set and those of the other people.
        People whose own set is empty are left out of the sum.
    """
    own = matching_sets[target]
    return float(sum(emd(own, other) for j, other in enumerate(matching_sets) if j != target and not other.is_empty))


def lof_neighborhood(count: int) -> int:
    """
    :param count: Number of people in the group.
    :return: k = round(count / 2), clamped to [1, count - 1].
    """
    return min(max(half_up_round(count / 2.0), 1), max(count - 1, 1))


def lof_scores(centers: np.ndarray, k: int | None = None, epsilon: float = 1e-9) -> np.ndarray:
    """
    Local outlier factor of every centre.
    :param centers: (N, 2) array of person centres.
    :param k: Neighbourhood size. Defaults to round(N / 2).
    :param epsilon: Spread of the centres below which all people count as standing at one point.
    :return: LOF value per centre. A lone centre, and every centre of a group standing at one point, has LOF 1.
    """
    points = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if len(points) < 2:
        return np.ones(len(points))
    if k is None:
        k = lof_neighborhood(len(points))
    k = min(max(k, 1), len(points) - 1)
    if float(np.ptp(points, axis=0).max()) <= epsilon:
        return np.ones(len(points))
    return -LocalOutlierFactor(n_neighbors=k).fit(points).negative_outlier_factor_


def lof(centers: np.ndarray, a: int, k: int | None = None, epsilon: float = 1e-9) -> float:
    """
    :param centers: (N, 2) array of person centres.
    :param a: Index of the centre to score.
    :param k: Neighbourhood size. Defaults to round(N / 2).
    :param epsilon: Spread of the centres below which all people count as standing at one point.
    :return: The local outlier factor of centre a.
    """
    return float(lof_scores(centers, k, epsilon)[a])


def stability_score(centers: np.ndarray, a: int, k: int | None = None, epsilon: float = 1e-9) -> float:
    """
    :return: 1 / LOF of centre a.
    """
    return 1.0 / lof(centers, a, k, epsilon)


@dataclass(frozen=True)
class Score_Range:
    """Range of one raw score over the people of a group image."""
    low: float
    high: float

    @staticmethod
    def of(values: list[float]):
        """
        :param values: Raw scores of one group.
        :return: Their range.
        """
        return Score_Range(float(min(values)), float(max(values)))

    def normalize(self, value: float) -> float:
        """
        :param value: A raw score within the range.
        :return: The min-max normalized value. A range of a single value normalizes everything to 1.
        """
        if self.high <= self.low:
            return 1.0
        return (value - self.low) / (self.high - self.low)


@dataclass(frozen=True)
class Score_Normalizer:
    """Ranges of the saliency, purity and stability scores of one group image."""
    saliency: Score_Range
    purity: Score_Range
    stability: Score_Range


def node_importance(sal: float, pur: float, stb: float, normalizer: Score_Normalizer,
                    alpha_pur: float = 1.0, alpha_stb: float = 1.0) -> float:
    """
    :param sal: Raw saliency.
    :param pur: Raw purity.
    :param stb: Raw stability.
    :param normalizer: The score ranges of the person's group.
    :param alpha_pur: Weight of purity.
    :param alpha_stb: Weight of stability.
    :return: Weighted sum of the normalized scores.
    """
    return (normalizer.saliency.normalize(sal) + alpha_pur * normalizer.purity.normalize(pur)
            + alpha_stb * normalizer.stability.normalize(stb))


def node_importances(centers: np.ndarray, matching_sets: list[Matching_Set], config: Importance_Config | None = None) -> np.ndarray:
    """
    Importance of every person in one group.
    People with an empty matching set get the group's largest raw saliency and purity (1.0 when no one has any).
    :param centers: (N, 2) array of person centres.
    :param matching_sets: Matching sets in node order.
    :param config: Importance configuration.
    :return: Importance per person.
    """
    if config is None:
        config = Importance_Config()
    count = len(matching_sets)
    assert len(centers) == count, f"Got {len(centers)} centres for {count} matching sets"
    if count == 0:
        return np.zeros(0)
    raw_saliency = [None if ms.is_empty else saliency_score(ms) for ms in matching_sets]
    raw_purity = [None if ms.is_empty else purity_score(i, matching_sets) for i, ms in enumerate(matching_sets)]
    saliency = _fill_missing(raw_saliency)
    purity = _fill_missing(raw_purity)
    stability = list(1.0 / lof_scores(centers, epsilon=config.lof_epsilon))
    normalizer = Score_Normalizer(Score_Range.of(saliency), Score_Range.of(purity), Score_Range.of(stability))
    return np.array([node_importance(saliency[i], purity[i], stability[i], normalizer, config.alpha_pur, config.alpha_stb)
                     for i in range(count)])


def _fill_missing(raw: list[float | None]) -> list[float]:
    present = [v for v in raw if v is not None]
    fill = max(present) if len(present) > 0 else 1.0
    return [fill if v is None else v for v in raw]
