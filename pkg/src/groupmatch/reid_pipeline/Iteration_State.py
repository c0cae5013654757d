"""Module containing the Iteration_State of the alternating importance and matching loop."""
from dataclasses import dataclass, field

from groupmatch.group_importance.Importance_Table import Importance_Table
from groupmatch.multi_order_matching.Match_Outcome import Match_Outcome


@dataclass(frozen=True)
class Iteration_Record:
    """Scores and assignment stability after one matching round."""
    iteration: int
    scores: dict[tuple[str, str], float]
    stable_fraction: float
    labelled_stable_fraction: float = 1.0


@dataclass
class Iteration_State:
    """Importances and outcomes of the latest matching round."""
    iteration: int = 0
    importances: dict[str, Importance_Table] = field(default_factory=dict)
    assignments: dict[tuple[str, str], Match_Outcome] = field(default_factory=dict)
    converged: bool = False
    history: list[Iteration_Record] = field(default_factory=list)

    @property
    def scores(self) -> dict[tuple[str, str], float]:
        """
        :return: Group score of every (probe, gallery) pair.
        """
        return {pair: outcome.score for pair, outcome in self.assignments.items()}

    def advance(self, importances: dict[str, Importance_Table], assignments: dict[tuple[str, str], Match_Outcome],
                stable_fraction: float, labelled_stable_fraction: float = 1.0):
        """
        Record a finished matching round.
        :param importances: Importances used in the round.
        :param assignments: Outcomes of the round.
        :param stable_fraction: Share of pairs whose assignment did not change.
        :param labelled_stable_fraction: Share of the labelled pairs whose assignment did not change.
        """
        self.iteration += 1
        self.importances = importances
        self.assignments = assignments
        self.history.append(Iteration_Record(self.iteration, self.scores, stable_fraction, labelled_stable_fraction))
