"""Ranking of gallery groups, CMC curves, F-scores and the repeated split protocol."""
import logging
from dataclasses import dataclass, field

import numpy as np

from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config
from groupmatch.groupmatch_exceptions import Unlabeled_Probe_Exception
from groupmatch.reid_pipeline.Iteration_State import Iteration_State
from groupmatch.reid_pipeline.Iterative_ReId import Iterative_ReId
from groupmatch.reid_pipeline.ReId_Task import ReId_Task

logger = logging.getLogger(__name__)

SUMMARY_RANKS: tuple[int, ...] = (1, 5, 10, 20)


@dataclass(frozen=True)
class CMC_Result:
    """Cumulative match rate at every rank and the person level F-score."""
    ranks: np.ndarray
    f_score: float = 1.0

    def rate(self, rank: int) -> float:
        """
        :param rank: 1-based rank.
        :return: Share of probes whose true gallery is within the first `rank` galleries.
            Ranks beyond the gallery size return the last rate.
        """
        assert rank >= 1, f"Ranks start at 1, got {rank}"
        if len(self.ranks) == 0:
            return 0.0
        return float(self.ranks[min(rank, len(self.ranks)) - 1])

    def summary(self) -> dict[str, float]:
        """
        :return: Rank-1/5/10/20 rates and the F-score.
        """
        summary = {f"rank{r}": self.rate(r) for r in SUMMARY_RANKS}
        summary["fScore"] = self.f_score
        return summary


def rank_galleries(scores: dict[tuple[str, str], float]) -> dict[str, list[str]]:
    """
    :param scores: Score of every (probe id, gallery id) pair.
    :return: For every probe, gallery ids by descending score; equal scores are ordered by gallery id.
    """
    per_probe: dict[str, list[tuple[float, str]]] = {}
    for (probe_id, gallery_id), score in scores.items():
        per_probe.setdefault(probe_id, []).append((score, gallery_id))
    return {probe_id: [g for _, g in sorted(entries, key=lambda e: (-e[0], e[1]))] for probe_id, entries in sorted(per_probe.items())}


def cmc(ranked_lists: dict[str, list[str]], ground_truth: dict[str, str], f_score: float = 1.0) -> CMC_Result:
    """
    :param ranked_lists: Ranked gallery ids of every probe.
    :param ground_truth: True gallery id of every probe.
    :param f_score: The F-score to attach to the result.
    :return: Match rate at every rank from 1 to the longest gallery list.
    """
    if len(ranked_lists) == 0:
        return CMC_Result(np.zeros(0), f_score)
    length = max(len(r) for r in ranked_lists.values())
    hits = np.zeros(length)
    for probe_id, ranked in ranked_lists.items():
        if probe_id not in ground_truth:
            raise Unlabeled_Probe_Exception(probe_id)
        if ground_truth[probe_id] in ranked:
            hits[ranked.index(ground_truth[probe_id])] += 1
    return CMC_Result(np.cumsum(hits) / len(ranked_lists), f_score)


def f_score(predicted: set, truth: set) -> float:
    """
    :param predicted: Predicted correspondences.
    :param truth: True correspondences.
    :return: Harmonic mean of precision and recall; 1 if both sets are empty.
    """
    if len(predicted) == 0 and len(truth) == 0:
        return 1.0
    correct = len(set(predicted) & set(truth))
    if correct == 0:
        return 0.0
    precision, recall = correct / len(predicted), correct / len(truth)
    return 2.0 * precision * recall / (precision + recall)


def person_correspondences(task: ReId_Task, state: Iteration_State) -> tuple[set, set]:
    """
    :param task: A labelled task.
    :param state: The final iteration state.
    :return: Predicted and true (probe id, gallery id, probe person, gallery person) tuples over the true pairs.
    """
    probes, galleries = task.probe_map, task.gallery_map
    predicted, truth = set(), set()
    for probe_id, gallery_id in task.labelled_pairs:
        outcome = state.assignments.get((probe_id, gallery_id))
        if outcome is not None:
            probe_people, gallery_people = probes[probe_id].person_ids, galleries[gallery_id].person_ids
            predicted.update((probe_id, gallery_id, probe_people[i], gallery_people[a]) for i, a in outcome.matched_pairs)
        truth.update((probe_id, gallery_id, p, q) for p, q in task.correspondences.get((probe_id, gallery_id), ()))
    return predicted, truth


def evaluate_state(task: ReId_Task, state: Iteration_State) -> CMC_Result:
    """
    :param task: A labelled task.
    :param state: The final iteration state of the task.
    :return: CMC curve of the final scores with the person level F-score.
    """
    predicted, truth = person_correspondences(task, state)
    return cmc(rank_galleries(state.scores), task.ground_truth, f_score(predicted, truth))


def per_iteration_cmc(task: ReId_Task, state: Iteration_State) -> list[CMC_Result]:
    """
    :return: The CMC curve of the scores of every recorded round.
    """
    return [cmc(rank_galleries(record.scores), task.ground_truth) for record in state.history]


@dataclass(frozen=True)
class Protocol_Result:
    """CMC curves averaged over repeated random splits."""
    mean: CMC_Result
    trials: list[CMC_Result] = field(default_factory=list)
    stable_fractions: list[float] = field(default_factory=list)
    labelled_stable_fractions: list[float] = field(default_factory=list)


def average_cmc(results: list[CMC_Result]) -> CMC_Result:
    """
    :param results: CMC results, possibly of different lengths.
    :return: The element-wise mean, shorter curves padded with their last rate.
    """
    if len(results) == 0:
        return CMC_Result(np.zeros(0), 0.0)
    length = max(len(r.ranks) for r in results)
    padded = [np.concatenate([r.ranks, np.full(length - len(r.ranks), r.ranks[-1] if len(r.ranks) > 0 else 0.0)]) for r in results]
    return CMC_Result(np.mean(padded, axis=0), float(np.mean([r.f_score for r in results])))


def evaluate_protocol(task: ReId_Task, config: GroupMatch_Config | None = None, trials: int | None = None,
                      fraction: float | None = None, seed: int | None = None) -> Protocol_Result:
    """
    Draw a share of the labelled pairs for testing, keep every distractor gallery, run and evaluate, and average over
    the trials. A fraction of 1 uses the whole task once per trial.
    :param task: A labelled task.
    :param config: Configuration; its pipeline block supplies the defaults of the other parameters.
    :param trials: Number of random splits.
    :param fraction: Share of the labelled pairs drawn per split.
    :param seed: Seed of the splits.
    :return: The averaged and per-trial results.
    """
    if config is None:
        config = GroupMatch_Config()
    trials = config.pipeline.trials if trials is None else trials
    fraction = config.pipeline.test_fraction if fraction is None else fraction
    seed = config.pipeline.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    results, stable_fractions, labelled_stable_fractions = [], [], []
    for trial in range(trials):
        split = task.split(fraction, rng)
        runner = Iterative_ReId(split, config)
        state = runner.run_iterations()
        result = evaluate_state(runner.task, state)
        logger.info(f"Trial {trial + 1}/{trials}: rank-1 {result.rate(1):.3f}, F-score {result.f_score:.3f}")
        results.append(result)
        last = state.history[-1] if len(state.history) > 0 else None
        stable_fractions.append(last.stable_fraction if last is not None else 1.0)
        labelled_stable_fractions.append(last.labelled_stable_fraction if last is not None else 1.0)
    return Protocol_Result(average_cmc(results), results, stable_fractions, labelled_stable_fractions)
