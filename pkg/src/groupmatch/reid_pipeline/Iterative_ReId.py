"""Module containing the Iterative_ReId class: alternates importance evaluation and multi-order matching over a task."""
import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor

from groupmatch.group_features.Group_Graph import Group_Graph
from groupmatch.group_importance.Importance_Table import Importance_Table
from groupmatch.group_importance.Matching_Set import build_matching_sets
from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config
from groupmatch.multi_order_matching.Affinity_Tensor import Bandwidths, calibrate_bandwidths
from groupmatch.multi_order_matching.Match_Outcome import Match_Outcome
from groupmatch.multi_order_matching.Multi_Order_Matcher import Multi_Order_Matcher
from groupmatch.reid_pipeline.Iteration_State import Iteration_State
from groupmatch.reid_pipeline.ReId_Task import ReId_Task

logger = logging.getLogger(__name__)


def _score_pair(arguments: tuple[Multi_Order_Matcher, Group_Graph, Group_Graph, Importance_Table, Importance_Table]) -> Match_Outcome:
    matcher, g_p, g_q, table_p, table_q = arguments
    return matcher.match(g_p, g_q, table_p, table_q)


def _assignment_is_forced(g_p: Group_Graph, g_q: Group_Graph) -> bool:
    return len(g_p) <= 1 and len(g_q) <= 1


def _stable_fraction(pairs: list[tuple[str, str]], current: dict[tuple[str, str], tuple], previous: dict[tuple[str, str], tuple] | None,
                     forced: set[tuple[str, str]]) -> float:
    if len(pairs) == 0:
        return 1.0
    stable = sum(1 for pair in pairs if pair in forced or (previous is not None and previous[pair] == current[pair]))
    return stable / len(pairs)


class Iterative_ReId:
    """Runs the importance and matching loop on one task."""

    def __init__(self, task: ReId_Task, config: GroupMatch_Config | None = None):
        if config is None:
            config = GroupMatch_Config()
        if config.pipeline.global_features:
            task = task.with_global_graphs()
            config = dataclasses.replace(config, matcher=dataclasses.replace(config.matcher, orders=(1,)))
        self.task: ReId_Task = task
        self.config: GroupMatch_Config = config
        self._bandwidths: Bandwidths | None = None

    @property
    def bandwidths(self) -> Bandwidths:
        """
        :return: Similarity bandwidths calibrated once on a seeded sample of the task's pairs.
        """
        if self._bandwidths is None:
            self._bandwidths = calibrate_bandwidths(self.task.pairs(), self.config.pipeline.bandwidth_samples,
                                                    self.config.pipeline.seed)
        return self._bandwidths

    def score_pairs(self, importances: dict[str, Importance_Table]) -> dict[tuple[str, str], Match_Outcome]:
        """
        Match every probe with every gallery. Worker processes are used when jobs > 1; results keep probe-major order.
        :param importances: Importance table of every group.
        :return: Outcome of every (probe id, gallery id) pair.
        """
        matcher = Multi_Order_Matcher(self.config.matcher, self.bandwidths)
        pairs = self.task.pairs()
        arguments = [(matcher, g_p, g_q, importances[g_p.group_id], importances[g_q.group_id]) for g_p, g_q in pairs]
        if self.config.pipeline.jobs > 1 and len(arguments) > 1:
            with ProcessPoolExecutor(max_workers=self.config.pipeline.jobs) as executor:
                outcomes = list(executor.map(_score_pair, arguments, chunksize=max(1, len(arguments) // (4 * self.config.pipeline.jobs))))
        else:
            outcomes = [_score_pair(a) for a in arguments]
        return {(g_p.group_id, g_q.group_id): outcome for (g_p, g_q), outcome in zip(pairs, outcomes)}

    def update_importances(self, assignments: dict[tuple[str, str], Match_Outcome]) -> dict[str, Importance_Table]:
        """
        Rebuild every person's matching set from the current matches against all groups of the other camera and
        evaluate the importances.
        :param assignments: Outcomes of the latest round.
        :return: Importance table of every group.
        """
        importances = {}
        for probe in self.task.probes:
            counterparts = [(gallery, assignments[(probe.group_id, gallery.group_id)].matched_pairs) for gallery in self.task.galleries]
            importances[probe.group_id] = Importance_Table.evaluate(probe, build_matching_sets(probe, counterparts), self.config.importance)
        for gallery in self.task.galleries:
            counterparts = [(probe, [(a, i) for i, a in assignments[(probe.group_id, gallery.group_id)].matched_pairs])
                            for probe in self.task.probes]
            importances[gallery.group_id] = Importance_Table.evaluate(gallery, build_matching_sets(gallery, counterparts), self.config.importance)
        return importances

    def uniform_importances(self) -> dict[str, Importance_Table]:
        """
        :return: Tables with every granule of every group at importance 1.
        """
        return {g.group_id: Importance_Table.uniform(g) for g in list(self.task.probes) + list(self.task.galleries)}

    def run_iterations(self) -> Iteration_State:
        """
        Match with uniform importances, then alternate importance updates and matching until no discrete assignment
        changes or the iteration limit is reached.
        :return: The final iteration state with its per-round history.
        """
        state = Iteration_State()
        importances = self.uniform_importances()
        pairs = self.task.pairs()
        forced = {(p.group_id, q.group_id) for p, q in pairs if _assignment_is_forced(p, q)}
        scored = {(p.group_id, q.group_id) for p, q in pairs}
        labelled = [pair for pair in self.task.labelled_pairs if pair in scored]
        previous: dict[tuple[str, str], tuple] | None = None
        for _round in range(self.config.pipeline.max_iter):
            assignments = self.score_pairs(importances)
            current = {pair: outcome.assignment for pair, outcome in assignments.items()}
            if not self.config.pipeline.assign_importance:
                # uniform importances make every round identical
                state.advance(importances, assignments, 1.0, 1.0)
                state.converged = True
                break
            stable_fraction = _stable_fraction(list(current), current, previous, forced)
            labelled_stable_fraction = _stable_fraction(labelled, current, previous, forced) if len(labelled) > 0 else stable_fraction
            state.advance(importances, assignments, stable_fraction, labelled_stable_fraction)
            logger.info(f"Iteration {state.iteration}: {stable_fraction:.1%} of {len(current)} assignments stable, "
                        f"{labelled_stable_fraction:.1%} of {len(labelled)} labelled pairs")
            if stable_fraction == 1.0:
                state.converged = True
                break
            previous = current
            if state.iteration < self.config.pipeline.max_iter:
                importances = self.update_importances(assignments)
        return state
