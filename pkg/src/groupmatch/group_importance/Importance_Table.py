"""Module containing the Importance_Table class: importance of every person, pair and triple of one group."""
import itertools
import logging

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph
from groupmatch.group_importance.Matching_Set import Matching_Set
from groupmatch.group_importance.granule_stability import omega2, omega3
from groupmatch.group_importance.importance_scores import node_importances
from groupmatch.groupmatch_config.GroupMatch_Config import Importance_Config

logger = logging.getLogger(__name__)


class Importance_Table:
    """
    Importances of the granules of one group graph, keyed by sorted node tuples.
    Built once per iteration and not changed afterwards.
    """

    def __init__(self, group_id: str, node: dict[int, float], edge: dict[tuple[int, int], float],
                 hyper_edge: dict[tuple[int, int, int], float]):
        self.group_id: str = group_id
        self._node: dict[int, float] = dict(node)
        self._edge: dict[tuple[int, int], float] = dict(edge)
        self._hyper_edge: dict[tuple[int, int, int], float] = dict(hyper_edge)

    @property
    def node(self) -> dict[int, float]:
        """
        :return: Importance of every person.
        """
        return dict(self._node)

    @property
    def edge(self) -> dict[tuple[int, int], float]:
        """
        :return: Importance of every pair (i, j), i < j.
        """
        return dict(self._edge)

    @property
    def hyper_edge(self) -> dict[tuple[int, int, int], float]:
        """
        :return: Importance of every triple (i, j, k), i < j < k.
        """
        return dict(self._hyper_edge)

    def granule(self, *vertices: int) -> float:
        """
        :param vertices: One, two or three distinct node indices in any order.
        :return: Importance of that granule.
        """
        key = tuple(sorted(vertices))
        if len(key) == 1:
            return self._node[key[0]]
        elif len(key) == 2:
            return self._edge[key]
        assert len(key) == 3, f"Granules have one to three people, got {vertices}"
        return self._hyper_edge[key]

    def node_vector(self, count: int) -> np.ndarray:
        """
        :param count: Number of nodes in the group.
        :return: Node importances as an array in node order.
        """
        return np.array([self._node[i] for i in range(count)], dtype=np.float64)

    def to_dict(self) -> dict:
        """
        :return: JSON-serializable view with granules written as dash-joined indices.
        """
        return {"groupId": self.group_id,
                "node": {str(i): v for i, v in sorted(self._node.items())},
                "edge": {f"{i}-{j}": v for (i, j), v in sorted(self._edge.items())},
                "hyperEdge": {f"{i}-{j}-{k}": v for (i, j, k), v in sorted(self._hyper_edge.items())}}

    def __eq__(self, other):
        if not isinstance(other, Importance_Table):
            return False
        return self.group_id == other.group_id and self._node == other._node and self._edge == other._edge and self._hyper_edge == other._hyper_edge

    def __str__(self):
        return f"Importances of {self.group_id}: {len(self._node)} people, {len(self._edge)} pairs, {len(self._hyper_edge)} triples"

    def __repr__(self):
        return str(self)

    @staticmethod
    def uniform(graph: Group_Graph):
        """
        :param graph: The group graph.
        :return: A table where every granule has importance 1.
        """
        return Importance_Table(graph.group_id, {i: 1.0 for i in range(len(graph))},
                                {e: 1.0 for e in itertools.combinations(range(len(graph)), 2)},
                                {h: 1.0 for h in itertools.combinations(range(len(graph)), 3)})

    @staticmethod
    def from_node_importances(graph: Group_Graph, importances: np.ndarray, config: Importance_Config | None = None):
        """
        :param graph: The group graph.
        :param importances: Importance of every person in node order.
        :param config: Importance configuration with the pair and triple scales and the recursion weight.
        :return: A table with pair and triple importances derived recursively from the people.
        """
        if config is None:
            config = Importance_Config()
        table = Importance_Table(graph.group_id, {i: float(v) for i, v in enumerate(importances)}, {}, {})
        for pair in itertools.combinations(range(len(graph)), 2):
            table._edge[pair] = subgroup_importance(table, graph, pair, config)
        for triple in itertools.combinations(range(len(graph)), 3):
            table._hyper_edge[triple] = subgroup_importance(table, graph, triple, config)
        return table

    @staticmethod
    def evaluate(graph: Group_Graph, matching_sets: list[Matching_Set], config: Importance_Config | None = None):
        """
        :param graph: The group graph.
        :param matching_sets: The current matching set of every person in node order.
        :param config: Importance configuration.
        :return: The importance table of the group under those matching sets.
        """
        importances = node_importances(graph.centers, matching_sets, config)
        logger.debug(f"Importances of {graph.group_id}: {np.round(importances, 4).tolist()}")
        return Importance_Table.from_node_importances(graph, importances, config)


def subgroup_importance(table: Importance_Table, gi: Group_Graph, granule: tuple[int, ...],
                        config: Importance_Config | None = None) -> float:
    """
    Importance of a pair or triple: its geometric stability plus lambda times the importances of the granules
    obtained by leaving one person out.
    :param table: Table holding at least the node importances.
    :param gi: The group graph.
    :param granule: Two or three distinct node indices.
    :param config: Importance configuration.
    :return: The recursive importance of the granule.
    """
    if config is None:
        config = Importance_Config()
    vertices = tuple(sorted(granule))
    if len(vertices) == 1:
        return table.granule(*vertices)
    if len(vertices) == 2:
        stability = omega2(gi, vertices[0], vertices[1], config.sigma_r)
    else:
        assert len(vertices) == 3, f"Granules have one to three people, got {granule}"
        stability = omega3(gi, *vertices, sigma_s=config.sigma_s)
    sub_granules = itertools.combinations(vertices, len(vertices) - 1)
    total = 0.0
    for sub in sub_granules:
        if len(sub) == 2 and sub in table._edge:
            total += table._edge[sub]
        else:
            total += subgroup_importance(table, gi, sub, config)
    return stability + config.lambda_ * total
