"""Module containing the Multi_Order_Matcher class: matches two group graphs at one, two and three person granularity."""
import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph
from groupmatch.group_importance.Importance_Table import Importance_Table
from groupmatch.groupmatch_config.GroupMatch_Config import Matcher_Config
from groupmatch.multi_order_matching.Acceptance_Tensor import Acceptance_Tensor
from groupmatch.multi_order_matching.Affinity_Tensor import Affinity_Tensor, Bandwidths, build_affinity
from groupmatch.multi_order_matching.Assignment_State import Assignment_State
from groupmatch.multi_order_matching.Match_Outcome import Match_Outcome, group_score, threshold_matches
from groupmatch.multi_order_matching.Transition_Tensor import Transition_Tensor, build_transition
from groupmatch.multi_order_matching.discretization import discretize
from groupmatch.multi_order_matching.reweighted_random_walk import rrw_iterate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matching_Problem:
    """The tensors of one probe/gallery pair."""
    affinity: Affinity_Tensor
    acceptance: Acceptance_Tensor
    transition: Transition_Tensor


def multi_order_objective(problem: Matching_Problem, mapping: np.ndarray) -> float:
    """
    :param problem: The matching problem.
    :param mapping: Binary (n_p, n_q) assignment matrix.
    :return: Sum over the walk's layers of x . (P x x) for the flattened assignment x.
    """
    x = np.asarray(mapping, dtype=np.float64).ravel()
    return float(sum(x @ problem.transition.intra(order, x) for order in problem.transition.layers))


class Multi_Order_Matcher:
    """Builds the affinity, acceptance and transition tensors of a group pair, walks them and scores the result."""

    def __init__(self, config: Matcher_Config | None = None, bandwidths: Bandwidths | None = None):
        if config is None:
            config = Matcher_Config()
        self.config: Matcher_Config = config
        self.bandwidths: Bandwidths | None = bandwidths

    def problem(self, g_p: Group_Graph, g_q: Group_Graph, table_p: Importance_Table, table_q: Importance_Table) -> Matching_Problem:
        """
        :param g_p: Probe group graph.
        :param g_q: Gallery group graph.
        :param table_p: Probe importances.
        :param table_q: Gallery importances.
        :return: The tensors of the pair.
        """
        affinity = build_affinity(g_p, g_q, self.config, self.bandwidths)
        acceptance = Acceptance_Tensor.build(affinity, table_p, table_q, self.config.alpha_w)
        transition = build_transition(affinity, acceptance, self.config.orders, self.config.mix_orders,
                                      self.config.fold_orders)
        return Matching_Problem(affinity, acceptance, transition)

    def solve(self, problem: Matching_Problem) -> Assignment_State:
        """
        :param problem: The tensors of a pair.
        :return: The soft assignment with its discrete mapping set.
        """
        state = rrw_iterate(problem.transition, self.config)
        discretize(state, self.config.discretizer)
        return state

    def match(self, g_p: Group_Graph, g_q: Group_Graph, table_p: Importance_Table | None = None,
              table_q: Importance_Table | None = None) -> Match_Outcome:
        """
        :param g_p: Probe group graph.
        :param g_q: Gallery group graph.
        :param table_p: Probe importances. Defaults to all ones.
        :param table_q: Gallery importances. Defaults to all ones.
        :return: The thresholded, scored outcome.
        """
        if table_p is None:
            table_p = Importance_Table.uniform(g_p)
        if table_q is None:
            table_q = Importance_Table.uniform(g_q)
        problem = self.problem(g_p, g_q, table_p, table_q)
        state = self.solve(problem)
        outcome = threshold_matches(state.discrete, problem.affinity.node_similarity, self.config.tau,
                                    g_p.group_id, g_q.group_id)
        outcome = group_score(problem.affinity, problem.acceptance, outcome, table_p.node_vector(len(g_p)),
                              table_q.node_vector(len(g_q)), self.config.orders, self.config.penalize_unmatched)
        logger.debug(f"{g_p.group_id}->{g_q.group_id}: {len(outcome.matches)} matches, score {outcome.score:.4f}, "
                     f"{state.iterations} walk steps")
        return dataclasses.replace(outcome, converged=state.converged, iterations=state.iterations)
