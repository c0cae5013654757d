"""Module containing the Transition_Tensor class: intra-order and inter-order moves of the multi-layer random walk."""
import numpy as np

from groupmatch.multi_order_matching.Acceptance_Tensor import Acceptance_Tensor
from groupmatch.multi_order_matching.Affinity_Tensor import Affinity_Tensor, contract


class Transition_Tensor:
    """
    One layer per matching order. Within a layer the walker moves along the order's weighted affinities scaled by the
    largest degree of that order; between layers it jumps at a fixed candidate with a weight proportional to the
    candidate's degree in the destination layer.
    A folded tensor has a single layer that moves along the affinities of every selected order at once, scaled by
    their largest combined degree.
    """

    def __init__(self, affinity: Affinity_Tensor, intra_values: dict[int, np.ndarray], degrees: dict[int, np.ndarray],
                 max_degrees: dict[int, float], layers: tuple[int, ...], mix_orders: bool = True,
                 folds: dict[int, tuple[int, ...]] | None = None):
        self.affinity: Affinity_Tensor = affinity
        self._intra_values: dict[int, np.ndarray] = intra_values
        self.degrees: dict[int, np.ndarray] = degrees
        self.max_degrees: dict[int, float] = max_degrees
        self.layers: tuple[int, ...] = layers
        self.mix_orders: bool = mix_orders
        self.folds: dict[int, tuple[int, ...]] = folds if folds is not None else {}

    @property
    def size(self) -> int:
        """
        :return: Number of correspondence candidates.
        """
        return self.affinity.candidates.size

    def intra_values(self, order: int) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :return: Entries of the intra-order tensor, aligned with the affinity entries of that order.
        """
        return self._intra_values[order]

    def intra(self, order: int, x: np.ndarray) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :param x: Walker distribution on the layer.
        :return: The intra-order tensor contracted with x twice, summed over the orders folded into the layer.
        """
        return sum(contract(o, self.affinity.indices(o), self._intra_values[o], x) for o in self.folds.get(order, (order,)))

    def inter_weights(self, order: int) -> np.ndarray:
        """
        :param order: The destination layer.
        :return: Per-candidate weight (d / d_max) / (N * L) of jumping into the layer.
        """
        if self.max_degrees[order] <= 0.0:
            return np.zeros(self.size)
        return self.degrees[order] / self.max_degrees[order] / (self.size * max(len(self.layers), 1))

    def inter(self, order: int, layer_states: dict[int, np.ndarray]) -> np.ndarray:
        """
        :param order: The destination layer.
        :param layer_states: Walker distribution on every layer.
        :return: The mass arriving from the other layers at every candidate.
        """
        total = sum(layer_states[o] for o in self.layers)
        return self.inter_weights(order) * (total ** 2 - layer_states[order] ** 2)

    def step(self, layer_states: dict[int, np.ndarray]) -> dict[int, np.ndarray]:
        """
        :param layer_states: Walker distribution on every layer.
        :return: Unnormalized distributions after one move.
        """
        moved = {}
        for order in self.layers:
            moved[order] = self.intra(order, layer_states[order])
            if self.mix_orders and len(self.layers) > 1:
                moved[order] = moved[order] + self.inter(order, layer_states)
        return moved


def build_transition(affinity: Affinity_Tensor, acceptance: Acceptance_Tensor, orders: tuple[int, ...] = (1, 2, 3),
                     mix_orders: bool = True, fold_orders: bool = False) -> Transition_Tensor:
    """
    :param affinity: The affinity tensor H.
    :param acceptance: The acceptance tensor W aligned with H.
    :param orders: Orders selected for the walk.
    :param mix_orders: If false, layers never exchange mass.
    :param fold_orders: If true, the selected orders are summed into one layer keyed by the highest order present.
    :return: The transition tensor. Orders with no positive weighted affinity are left out of the layers and keep a
        zero tensor.
    """
    intra_values, degrees, max_degrees = {}, {}, {}
    size = affinity.candidates.size
    weighted = {}
    for order in (1, 2, 3):
        weighted[order] = affinity.values(order) * acceptance.weights(order)
        if order not in orders:
            weighted[order] = np.zeros_like(weighted[order])
        degrees[order] = contract(order, affinity.indices(order), weighted[order], np.ones(size))
        max_degrees[order] = float(degrees[order].max()) if size > 0 else 0.0
    if fold_orders:
        present = tuple(o for o in (1, 2, 3) if max_degrees[o] > 0.0)
        if len(present) == 0:
            return Transition_Tensor(affinity, {o: np.zeros_like(weighted[o]) for o in weighted}, degrees, max_degrees, (), mix_orders)
        key = present[-1]
        degrees[key] = sum(degrees[o] for o in present)
        max_degrees[key] = float(degrees[key].max())
        for order in (1, 2, 3):
            intra_values[order] = weighted[order] / max_degrees[key] if order in present else np.zeros_like(weighted[order])
        return Transition_Tensor(affinity, intra_values, degrees, max_degrees, (key,), mix_orders, {key: present})
    layers = []
    for order in (1, 2, 3):
        if max_degrees[order] > 0.0:
            intra_values[order] = weighted[order] / max_degrees[order]
            layers.append(order)
        else:
            intra_values[order] = np.zeros_like(weighted[order])
    return Transition_Tensor(affinity, intra_values, degrees, max_degrees, tuple(layers), mix_orders)
