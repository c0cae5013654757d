"""Module containing the Assignment_State class."""
from dataclasses import dataclass, field

import numpy as np

from groupmatch.multi_order_matching.Candidate_Index import Candidate_Index


@dataclass
class Assignment_State:
    """Soft assignment of every matching order, the confidence in each order and the discrete mapping derived from them."""
    candidates: Candidate_Index
    soft: dict[int, np.ndarray]
    order_confidence: np.ndarray = field(default_factory=lambda: np.full(3, 1.0 / 3.0))
    discrete: np.ndarray | None = None
    converged: bool = False
    iterations: int = 0

    def __post_init__(self):
        for order, x in self.soft.items():
            assert x.shape == (self.candidates.size,), f"Order {order} soft assignment has shape {x.shape}, expected ({self.candidates.size},)"
            assert np.all(x >= 0), f"Order {order} soft assignment has negative entries"

    @property
    def integrated(self) -> np.ndarray:
        """
        :return: The sum of the soft assignments of all orders, shaped (n_p, n_q).
        """
        total = np.zeros(self.candidates.size)
        for x in self.soft.values():
            total = total + x
        return self.candidates.as_matrix(total)

    def matches(self) -> list[tuple[int, int]]:
        """
        :return: The (probe node, gallery node) pairs of the discrete mapping in probe order.
        """
        if self.discrete is None:
            return []
        rows, columns = np.nonzero(self.discrete)
        return [(int(i), int(a)) for i, a in zip(rows, columns)]
