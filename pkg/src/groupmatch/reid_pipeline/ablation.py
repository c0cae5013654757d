"""Variants of the re-identification method and their side-by-side comparison."""
import csv
import dataclasses
import io
import logging
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config
from groupmatch.groupmatch_exceptions import Unknown_Variant_Exception
from groupmatch.reid_datasets.synthetic_groups import Synth_Config, generate_synthetic
from groupmatch.reid_pipeline.Iterative_ReId import Iterative_ReId
from groupmatch.reid_pipeline.ReId_Task import ReId_Task
from groupmatch.reid_pipeline.evaluation import CMC_Result, evaluate_protocol, evaluate_state

logger = logging.getLogger(__name__)


class ReId_Variant(Enum):
    """Enumeration of the method variants compared in an ablation."""
    Global = "global"
    Finer = "finer"
    Finer_Middle = "finer-middle"
    No_Assign = "no-assign"
    Proposed = "proposed"
    Hyper = "hyper"
    No_Penalty = "no-penalty"
    No_Threshold = "no-threshold"

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)

    @property
    def orders(self) -> tuple[int, ...]:
        """
        :return: The granularities matched by the variant.
        """
        if self in (ReId_Variant.Global, ReId_Variant.Finer):
            return (1,)
        elif self is ReId_Variant.Finer_Middle:
            return 1, 2
        return 1, 2, 3

    @property
    def assigns_importance(self) -> bool:
        """
        :return: True if importances are re-evaluated from the matches.
        """
        return self in (ReId_Variant.Proposed, ReId_Variant.No_Penalty, ReId_Variant.No_Threshold)

    @property
    def mixes_orders(self) -> bool:
        """
        :return: True if the random walk exchanges mass between orders.
        """
        return self is not ReId_Variant.Hyper

    @property
    def folds_orders(self) -> bool:
        """
        :return: True if all orders are summed into one walk layer.
        """
        return self is ReId_Variant.Hyper

    @property
    def penalizes_unmatched(self) -> bool:
        """
        :return: True if unmatched people lower the group score.
        """
        return self is not ReId_Variant.No_Penalty

    @property
    def thresholds_matches(self) -> bool:
        """
        :return: True if low similarity matches are dropped.
        """
        return self is not ReId_Variant.No_Threshold

    @property
    def uses_global_features(self) -> bool:
        """
        :return: True if each group is described by one whole-group descriptor.
        """
        return self is ReId_Variant.Global

    def configure(self, config: GroupMatch_Config) -> GroupMatch_Config:
        """
        :param config: The base configuration.
        :return: The configuration of this variant.
        """
        matcher = dataclasses.replace(config.matcher, orders=self.orders, mix_orders=self.mixes_orders,
                                      fold_orders=self.folds_orders, penalize_unmatched=self.penalizes_unmatched,
                                      tau=config.matcher.tau if self.thresholds_matches else 0.0)
        pipeline = dataclasses.replace(config.pipeline, assign_importance=config.pipeline.assign_importance and self.assigns_importance,
                                       global_features=self.uses_global_features)
        return dataclasses.replace(config, matcher=matcher, pipeline=pipeline)

    @staticmethod
    def get_variant(name: str):
        """
        :param name: Variant name such as "no-assign".
        :return: The variant.
        """
        for variant in ReId_Variant:
            if variant.value == name.strip().lower():
                return variant
        raise Unknown_Variant_Exception(name, [v.value for v in ReId_Variant])


def run_ablation(task: ReId_Task, variants: list[ReId_Variant], config: GroupMatch_Config | None = None,
                 trials: int | None = None, fraction: float | None = None) -> list[tuple[ReId_Variant, CMC_Result]]:
    """
    Evaluate every variant on the same seeded splits.
    :param task: A labelled task.
    :param variants: Variants to compare.
    :param config: Base configuration.
    :param trials: Number of random splits.
    :param fraction: Share of the labelled pairs drawn per split.
    :return: The averaged CMC result of every variant, in the given order. Repeated variants are evaluated again.
    """
    if config is None:
        config = GroupMatch_Config()
    results = []
    for variant in variants:
        logger.info(f"Evaluating variant {variant}")
        results.append((variant, evaluate_protocol(task, variant.configure(config), trials, fraction).mean))
    return results


def ablation_csv(results: list[tuple[ReId_Variant, CMC_Result]]) -> str:
    """
    :param results: Result of every variant.
    :return: CSV text with columns variant,rank,rate and one row per variant per rank.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["variant", "rank", "rate"])
    for variant, result in results:
        for rank in range(1, len(result.ranks) + 1):
            writer.writerow([variant.value, rank, f"{result.rate(rank):.6f}"])
    return buffer.getvalue()


@dataclass(frozen=True)
class Suite_Config:
    """Synthetic benchmark on which variants are compared: one generated task per seed."""
    n_pairs: int = 100
    size_range: tuple[int, int] = (3, 6)
    layout_noise: float = 0.05
    churn_rate: float = 0.2
    distractor_count: int = 10
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    descriptor_blocks: int = Synth_Config.descriptor_blocks

    def synth_config(self, seed: int) -> Synth_Config:
        """
        :param seed: Seed of one task.
        :return: Generator parameters of the task drawn with that seed.
        """
        return Synth_Config(n_pairs=self.n_pairs, size_range=self.size_range, layout_noise=self.layout_noise,
                            churn_rate=self.churn_rate, distractor_count=self.distractor_count, seed=seed,
                            descriptor_blocks=self.descriptor_blocks)


@dataclass
class Suite_Result:
    """Rank-1 rate and labelled pair stability of every variant on every seed of a suite."""
    rank1: dict[ReId_Variant, list[float]] = field(default_factory=dict)
    labelled_stable_fractions: dict[ReId_Variant, list[float]] = field(default_factory=dict)
    seconds: float = 0.0

    def median_rank1(self, variant: ReId_Variant) -> float:
        """
        :param variant: A variant run by the suite.
        :return: Median rank-1 rate of the variant over the seeds.
        """
        return float(np.median(self.rank1[variant]))

    def median_table(self) -> list[tuple[ReId_Variant, float]]:
        """
        :return: Median rank-1 rate of every variant in run order.
        """
        return [(variant, self.median_rank1(variant)) for variant in self.rank1]


def synthetic_suite(variants: list[ReId_Variant], suite: Suite_Config | None = None,
                    config: GroupMatch_Config | None = None) -> Suite_Result:
    """
    Generate one task per seed and run every variant on the whole of it.
    :param variants: Variants to compare.
    :param suite: The benchmark parameters.
    :param config: Base configuration; its pipeline seed is replaced by the suite seed of each task.
    :return: Rank-1 rates and final labelled pair stability per variant per seed, and the wall-clock time of the suite.
    """
    if suite is None:
        suite = Suite_Config()
    if config is None:
        config = GroupMatch_Config()
    result = Suite_Result({v: [] for v in variants}, {v: [] for v in variants})
    start = time.perf_counter()
    for seed in suite.seeds:
        task, _ground_truth = generate_synthetic(suite.synth_config(seed), config.features)
        seeded = config.with_seed(seed)
        for variant in variants:
            runner = Iterative_ReId(task, variant.configure(seeded))
            state = runner.run_iterations()
            rank1 = evaluate_state(runner.task, state).rate(1)
            result.rank1[variant].append(rank1)
            result.labelled_stable_fractions[variant].append(state.history[-1].labelled_stable_fraction)
            logger.info(f"Seed {seed}, variant {variant}: rank-1 {rank1:.3f} after {state.iteration} rounds")
    result.seconds = time.perf_counter() - start
    return result
