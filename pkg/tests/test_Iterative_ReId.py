"""Tests of the alternating importance and matching loop, the split protocol and ablations on synthetic tasks."""
import dataclasses
import os
from unittest import TestCase, skipUnless

from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config
from groupmatch.groupmatch_exceptions import Unlabeled_Probe_Exception
from groupmatch.reid_datasets.synthetic_groups import Synth_Config, generate_synthetic
from groupmatch.reid_pipeline.Iterative_ReId import Iterative_ReId
from groupmatch.reid_pipeline.ReId_Task import ReId_Task
from groupmatch.reid_pipeline.ablation import ReId_Variant, Suite_Config, run_ablation, synthetic_suite
from groupmatch.reid_pipeline.evaluation import evaluate_protocol, per_iteration_cmc
from groupmatch.run_groupmatch import evaluate_task, run_reid


def _clean_task(n_pairs: int = 4, distractors: int = 0, seed: int = 0) -> ReId_Task:
    config = Synth_Config(n_pairs=n_pairs, size_range=(2, 4), layout_noise=0.0, feature_noise=0.0, churn_rate=0.0,
                          distractor_count=distractors, seed=seed, view_change=0.0, descriptor_blocks=8)
    task, _ = generate_synthetic(config)
    return task


def _noisy_task(seed: int = 1) -> ReId_Task:
    config = Synth_Config(n_pairs=5, size_range=(3, 5), layout_noise=0.01, feature_noise=0.01, churn_rate=0.2,
                          distractor_count=2, seed=seed, descriptor_blocks=8)
    task, _ = generate_synthetic(config)
    return task


class Test_Iterative_ReId(TestCase):

    def test_identical_views_rank_first(self):
        result, state = evaluate_task(_clean_task(), ReId_Variant.No_Assign.configure(GroupMatch_Config()))
        print(f"rank-1 {result.rate(1)}, F-score {result.f_score}, {state.iteration} rounds")
        assert result.rate(1) == 1.0
        assert result.f_score == 1.0
        assert len(state.assignments) == 16
        proposed, _ = evaluate_task(_clean_task())
        assert proposed.rate(1) == 1.0, f"Proposed rank-1 {proposed.rate(1)} on identical views"

    def test_history(self):
        task = _clean_task()
        state = run_reid(task)
        assert 1 <= state.iteration <= GroupMatch_Config().pipeline.max_iter
        assert len(state.history) == state.iteration
        assert state.history[-1].scores == state.scores
        assert all(0.0 <= record.stable_fraction <= 1.0 for record in state.history)
        assert len(per_iteration_cmc(task, state)) == state.iteration
        assert set(state.importances) == {g.group_id for g in task.probes + task.galleries}

    def test_labelled_pairs_settle(self):
        state = run_reid(_clean_task(n_pairs=6, distractors=2))
        print(f"Stable labelled pairs per round: {[record.labelled_stable_fraction for record in state.history]}")
        assert state.iteration <= 5
        assert state.history[0].labelled_stable_fraction == 0.0
        assert state.history[-1].labelled_stable_fraction >= 0.9

    def test_deterministic(self):
        task = _noisy_task()
        first, second = run_reid(task), run_reid(task)
        assert first.scores == second.scores
        assert first.iteration == second.iteration

    def test_worker_processes_give_the_same_scores(self):
        task = _noisy_task(2)
        serial = run_reid(task, GroupMatch_Config())
        parallel = run_reid(task, GroupMatch_Config().with_jobs(2))
        assert serial.scores == parallel.scores

    def test_without_importance_assignment(self):
        config = ReId_Variant.No_Assign.configure(GroupMatch_Config())
        state = run_reid(_noisy_task(), config)
        assert state.iteration == 1 and state.converged
        assert all(table.node_vector(1)[0] == 1.0 for table in state.importances.values())

    def test_global_variant(self):
        task = _clean_task()
        runner = Iterative_ReId(task, ReId_Variant.Global.configure(GroupMatch_Config()))
        assert all(len(g) == 1 for g in runner.task.probes)
        assert runner.config.matcher.orders == (1,)
        result, _ = evaluate_task(task, ReId_Variant.Global.configure(GroupMatch_Config()))
        assert result.f_score == 0.0
        assert len(result.ranks) == 4

    def test_unlabeled_probe(self):
        task = _clean_task()
        unlabeled = dataclasses.replace(task, ground_truth={}, correspondences={})
        with self.assertRaises(Unlabeled_Probe_Exception):
            evaluate_task(unlabeled)
        assert len(run_reid(unlabeled).assignments) == 16


class Test_Protocol(TestCase):

    def test_split_protocol(self):
        task = _clean_task(n_pairs=6, distractors=2)
        config = ReId_Variant.No_Assign.configure(GroupMatch_Config().with_seed(3))
        protocol = evaluate_protocol(task, config, trials=2, fraction=0.5)
        assert len(protocol.trials) == 2 and len(protocol.stable_fractions) == 2
        for trial in protocol.trials:
            assert len(trial.ranks) == 3 + 2
        assert protocol.mean.rate(1) >= 0.5
        again = evaluate_protocol(task, config, trials=2, fraction=0.5)
        assert [list(t.ranks) for t in again.trials] == [list(t.ranks) for t in protocol.trials]

    def test_ablation(self):
        task = _clean_task(n_pairs=3)
        results = run_ablation(task, [ReId_Variant.Finer, ReId_Variant.Proposed, ReId_Variant.Finer], GroupMatch_Config(),
                               trials=1, fraction=1.0)
        assert [v for v, _ in results] == [ReId_Variant.Finer, ReId_Variant.Proposed, ReId_Variant.Finer]
        assert list(results[0][1].ranks) == list(results[2][1].ranks)
        assert all(len(r.ranks) == 3 for _, r in results)

    def test_synthetic_suite(self):
        suite = Suite_Config(n_pairs=3, size_range=(2, 4), distractor_count=1, seeds=(0, 1), descriptor_blocks=8)
        result = synthetic_suite([ReId_Variant.Finer, ReId_Variant.No_Assign], suite)
        assert [v for v, _ in result.median_table()] == [ReId_Variant.Finer, ReId_Variant.No_Assign]
        assert all(len(rates) == 2 for rates in result.rank1.values())
        assert all(0.0 <= r <= 1.0 for rates in result.rank1.values() for r in rates)
        assert result.labelled_stable_fractions[ReId_Variant.No_Assign] == [1.0, 1.0]
        assert result.seconds > 0.0


@skipUnless(os.environ.get("GROUPMATCH_ACCEPTANCE"), "set GROUPMATCH_ACCEPTANCE=1 to run the full synthetic benchmark")
class Test_Synthetic_Benchmark(TestCase):

    def test_variant_ordering_and_runtime(self):
        ordered = [ReId_Variant.Proposed, ReId_Variant.No_Assign, ReId_Variant.Finer_Middle, ReId_Variant.Finer, ReId_Variant.Global]
        variants = ordered + [ReId_Variant.No_Penalty, ReId_Variant.No_Threshold]
        result = synthetic_suite(variants, Suite_Config(), GroupMatch_Config().with_jobs(4))
        medians = dict(result.median_table())
        print(f"Median rank-1 {medians} in {result.seconds:.0f}s")
        for better, worse in zip(ordered, ordered[1:]):
            assert medians[better] >= medians[worse], f"{better} {medians[better]:.3f} below {worse} {medians[worse]:.3f}"
        assert medians[ReId_Variant.Proposed] - medians[ReId_Variant.Finer] >= 0.05
        assert medians[ReId_Variant.Proposed] >= medians[ReId_Variant.No_Penalty]
        assert medians[ReId_Variant.Proposed] >= medians[ReId_Variant.No_Threshold]
        stable = result.labelled_stable_fractions[ReId_Variant.Proposed]
        assert min(stable) >= 0.9, f"Stable labelled pairs per seed {stable}"
        assert result.seconds < 600.0, f"Benchmark took {result.seconds:.0f}s"
