"""Module containing the Acceptance_Tensor class: importance agreement weights of matched granules."""
import numpy as np

from groupmatch.group_importance.Importance_Table import Importance_Table
from groupmatch.multi_order_matching.Affinity_Tensor import Affinity_Tensor, ORDERS


def acceptance_tensor(w_p: float | np.ndarray, w_q: float | np.ndarray, alpha_w: float = 0.1) -> float | np.ndarray:
    """
    :param w_p: Importance of the probe granule.
    :param w_q: Importance of the gallery granule.
    :param alpha_w: Positive penalty on importance disagreement.
    :return: (w_p * w_q) / (alpha_w + |w_p - w_q|).
    """
    assert alpha_w > 0, f"alpha_w must be positive, got {alpha_w}"
    return w_p * w_q / (alpha_w + np.abs(w_p - w_q))


class Acceptance_Tensor:
    """Acceptance weights aligned entry by entry with an Affinity_Tensor."""

    def __init__(self, weights: dict[int, np.ndarray], alpha_w: float):
        self.alpha_w: float = alpha_w
        self._weights: dict[int, np.ndarray] = weights

    def weights(self, order: int) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :return: Weights aligned with the affinity entries of that order.
        """
        return self._weights[order]

    @staticmethod
    def build(affinity: Affinity_Tensor, table_p: Importance_Table, table_q: Importance_Table, alpha_w: float = 0.1):
        """
        :param affinity: The affinity tensor whose entries are weighted.
        :param table_p: Importances of the probe group.
        :param table_q: Importances of the gallery group.
        :param alpha_w: Penalty on importance disagreement.
        :return: The acceptance tensor.
        """
        n_q = affinity.candidates.n_q
        weights = {}
        for order in ORDERS:
            indices = affinity.indices(order)
            probe_nodes, gallery_nodes = np.divmod(indices, n_q)
            w_p = np.array([table_p.granule(*row) for row in probe_nodes.tolist()], dtype=np.float64)
            w_q = np.array([table_q.granule(*row) for row in gallery_nodes.tolist()], dtype=np.float64)
            weights[order] = acceptance_tensor(w_p, w_q, alpha_w) if len(indices) > 0 else np.zeros(0)
        return Acceptance_Tensor(weights, alpha_w)
