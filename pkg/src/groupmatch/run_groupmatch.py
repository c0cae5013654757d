"""A Module containing the run_reid and evaluate_task functions for running the group re-identification pipeline on a task."""
from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config
from groupmatch.groupmatch_exceptions import Unlabeled_Probe_Exception
from groupmatch.reid_pipeline.Iteration_State import Iteration_State
from groupmatch.reid_pipeline.Iterative_ReId import Iterative_ReId
from groupmatch.reid_pipeline.ReId_Task import ReId_Task
from groupmatch.reid_pipeline.evaluation import CMC_Result, evaluate_state


def run_reid(task: ReId_Task, config: GroupMatch_Config | None = None) -> Iteration_State:
    """
    Runs the alternating importance and matching loop on every probe and gallery pair of the task.
    :param task: The probe and gallery groups.
    :param config: The configuration. Defaults to the built-in defaults.
    :return: The final iteration state holding the scores, matches and importances.
    """
    return Iterative_ReId(task, config).run_iterations()


def require_labels(task: ReId_Task):
    """
    :param task: The task to check.
    :raises Unlabeled_Probe_Exception: If a probe has no true gallery.
    """
    for probe in task.probes:
        if probe.group_id not in task.ground_truth:
            raise Unlabeled_Probe_Exception(probe.group_id)


def evaluate_task(task: ReId_Task, config: GroupMatch_Config | None = None) -> tuple[CMC_Result, Iteration_State]:
    """
    :param task: A task in which every probe has a true gallery.
    :param config: The configuration.
    :return: The CMC curve with its F-score, and the final iteration state.
    :raises Unlabeled_Probe_Exception: If a probe has no true gallery.
    """
    require_labels(task)
    runner = Iterative_ReId(task, config)
    state = runner.run_iterations()
    return evaluate_state(runner.task, state), state
