"""Module containing the Match_Outcome class, similarity thresholding of matches and the penalized group score."""
import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from groupmatch.multi_order_matching.Acceptance_Tensor import Acceptance_Tensor
from groupmatch.multi_order_matching.Affinity_Tensor import Affinity_Tensor, ORDERS


@dataclass(frozen=True)
class Match_Outcome:
    """Result of matching a probe group to a gallery group."""
    probe_group_id: str
    gallery_group_id: str
    matches: tuple[tuple[int, int, float], ...]
    unmatched_p: tuple[int, ...]
    unmatched_q: tuple[int, ...]
    score: float = 0.0
    per_order_means: tuple[float, float, float] = (0.0, 0.0, 0.0)
    converged: bool = True
    iterations: int = 0
    assignment: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        matched_p = [i for i, _, _ in self.matches]
        matched_q = [a for _, a, _ in self.matches]
        assert len(set(matched_p)) == len(matched_p) and len(set(matched_q)) == len(matched_q), \
            f"Matches of {self.probe_group_id}->{self.gallery_group_id} are not one-to-one"
        assert not set(matched_p) & set(self.unmatched_p), f"A probe node is both matched and unmatched in {self.probe_group_id}"
        assert not set(matched_q) & set(self.unmatched_q), f"A gallery node is both matched and unmatched in {self.gallery_group_id}"

    @property
    def matched_pairs(self) -> list[tuple[int, int]]:
        """
        :return: The (probe node, gallery node) pairs that survived thresholding.
        """
        return [(i, a) for i, a, _ in self.matches]

    def to_dict(self, person_ids_p: list[str] | None = None, person_ids_q: list[str] | None = None) -> dict:
        """
        :param person_ids_p: Optional probe person ids to report instead of node indices.
        :param person_ids_q: Optional gallery person ids to report instead of node indices.
        :return: JSON-serializable view of the outcome.
        """
        def p_name(i):
            return person_ids_p[i] if person_ids_p is not None else i

        def q_name(a):
            return person_ids_q[a] if person_ids_q is not None else a

        return {"probeGroupId": self.probe_group_id, "galleryGroupId": self.gallery_group_id,
                "score": self.score, "perOrderMeans": list(self.per_order_means),
                "matches": [{"probe": p_name(i), "gallery": q_name(a), "similarity": s} for i, a, s in self.matches],
                "unmatchedProbe": [p_name(i) for i in self.unmatched_p],
                "unmatchedGallery": [q_name(a) for a in self.unmatched_q],
                "converged": self.converged, "iterations": self.iterations}


def threshold_matches(mapping: np.ndarray, node_similarity: np.ndarray, tau: float = 0.3,
                      probe_group_id: str = "", gallery_group_id: str = "") -> Match_Outcome:
    """
    Drop matched pairs whose node similarity is below tau; both people of a dropped pair become unmatched.
    :param mapping: Binary (n_p, n_q) assignment matrix.
    :param node_similarity: (n_p, n_q) node similarities.
    :param tau: Similarity threshold in [0, 1).
    :param probe_group_id: Probe group id recorded in the outcome.
    :param gallery_group_id: Gallery group id recorded in the outcome.
    :return: An unscored outcome with the surviving matches and the unmatched sets.
    """
    n_p, n_q = mapping.shape
    rows, columns = np.nonzero(mapping)
    assignment = tuple((int(i), int(a)) for i, a in zip(rows, columns))
    matches = tuple((i, a, float(node_similarity[i, a])) for i, a in assignment if node_similarity[i, a] >= tau)
    matched_p = {i for i, _, _ in matches}
    matched_q = {a for _, a, _ in matches}
    return Match_Outcome(probe_group_id, gallery_group_id, matches,
                         tuple(i for i in range(n_p) if i not in matched_p),
                         tuple(a for a in range(n_q) if a not in matched_q),
                         assignment=assignment)


def surviving_assignment(outcome: Match_Outcome, n_q: int, size: int) -> np.ndarray:
    """
    :param outcome: Thresholded outcome.
    :param n_q: Number of gallery nodes.
    :param size: Number of candidates.
    :return: Binary vector over candidates marking the surviving matches.
    """
    x_hat = np.zeros(size, dtype=bool)
    for i, a, _ in outcome.matches:
        x_hat[i * n_q + a] = True
    return x_hat


def masked_order_means(affinity: Affinity_Tensor, acceptance: Acceptance_Tensor, outcome: Match_Outcome,
                       orders: tuple[int, ...] = ORDERS) -> tuple[float, float, float]:
    """
    :return: For every order, the mean of the non-zero weighted affinities over tuples whose candidates all survive.
        Zero for orders left out or without such tuples.
    """
    x_hat = surviving_assignment(outcome, affinity.candidates.n_q, affinity.candidates.size)
    means = [0.0, 0.0, 0.0]
    for order in orders:
        indices = affinity.indices(order)
        if len(indices) == 0:
            continue
        kept = x_hat[indices].all(axis=1)
        weighted = affinity.values(order)[kept] * acceptance.weights(order)[kept]
        weighted = weighted[weighted > 0.0]
        if len(weighted) > 0:
            means[order - 1] = float(weighted.mean())
    return means[0], means[1], means[2]


def unmatched_penalty(outcome: Match_Outcome, importances_p: np.ndarray, importances_q: np.ndarray) -> float:
    """
    :return: Sum of the logistic of the importance of every unmatched person.
    """
    return float(expit(np.asarray(importances_p)[list(outcome.unmatched_p)]).sum()
                 + expit(np.asarray(importances_q)[list(outcome.unmatched_q)]).sum())


def group_score(affinity: Affinity_Tensor, acceptance: Acceptance_Tensor, outcome: Match_Outcome,
                importances_p: np.ndarray, importances_q: np.ndarray, orders: tuple[int, ...] = ORDERS,
                penalize: bool = True) -> Match_Outcome:
    """
    :param affinity: The affinity tensor.
    :param acceptance: The acceptance tensor.
    :param outcome: The thresholded outcome.
    :param importances_p: Importance of every probe person.
    :param importances_q: Importance of every gallery person.
    :param orders: Orders that contribute to the score.
    :param penalize: If false, unmatched people cost nothing.
    :return: The outcome with score set to the sum of the per-order means minus the unmatched penalty.
    """
    means = masked_order_means(affinity, acceptance, outcome, orders)
    score = sum(means)
    if penalize:
        score -= unmatched_penalty(outcome, importances_p, importances_q)
    return dataclasses.replace(outcome, score=float(score), per_order_means=means)
