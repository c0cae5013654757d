"""Module containing the Affinity_Tensor class and the construction of node, edge and hyper-edge affinities between two groups."""
import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from groupmatch.group_features.Group_Graph import Group_Graph
from groupmatch.groupmatch_config.GroupMatch_Config import Matcher_Config
from groupmatch.multi_order_matching.Candidate_Index import Candidate_Index

logger = logging.getLogger(__name__)

ORDERS: tuple[int, int, int] = (1, 2, 3)


@dataclass(frozen=True)
class Bandwidths:
    """Kernel bandwidth of the similarity of each order."""
    node: float = 1.0
    edge: float = 1.0
    hyper: float = 1.0

    def for_order(self, order: int) -> float:
        """
        :param order: 1, 2 or 3.
        :return: The bandwidth of that order.
        """
        return {1: self.node, 2: self.edge, 3: self.hyper}[order]


def selection_tensor(k: int, c1: int, c2: int, c3: int) -> int:
    """
    :param k: Order, 1, 2 or 3.
    :return: 1 if the index tuple holds exactly k distinct candidates, otherwise 0.
    """
    assert k in ORDERS, f"Order must be one of {ORDERS}, got {k}"
    return int(len({c1, c2, c3}) == k)


def contract(order: int, indices: np.ndarray, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Compute T x x over the second and third modes of a symmetric rank-3 tensor restricted to one order.
    :param order: The number of distinct candidates in every stored tuple.
    :param indices: (m, order) sorted candidate tuples, one per symmetric family of entries.
    :param values: (m,) value shared by every permutation of the tuple.
        An order-2 tuple (c1, c2) stands for both index multisets {c1, c1, c2} and {c1, c2, c2}.
    :param x: Vector over all candidates.
    :return: Vector over all candidates.
    """
    size = len(x)
    if len(values) == 0:
        return np.zeros(size)
    if order == 1:
        c = indices[:, 0]
        return np.bincount(c, values * x[c] ** 2, minlength=size)
    if order == 2:
        c1, c2 = indices[:, 0], indices[:, 1]
        cross = 2.0 * x[c1] * x[c2]
        return (np.bincount(c1, values * (x[c2] ** 2 + cross), minlength=size)
                + np.bincount(c2, values * (x[c1] ** 2 + cross), minlength=size))
    c1, c2, c3 = indices[:, 0], indices[:, 1], indices[:, 2]
    return 2.0 * (np.bincount(c1, values * x[c2] * x[c3], minlength=size)
                  + np.bincount(c2, values * x[c1] * x[c3], minlength=size)
                  + np.bincount(c3, values * x[c1] * x[c2], minlength=size))


class Affinity_Tensor:
    """
    Sparse symmetric rank-3 affinity over correspondence candidates.
    Diagonal entries (c, c, c) hold node similarities, entries with two distinct candidates hold edge similarities and
    entries with three distinct candidates hold hyper-edge similarities.
    """

    def __init__(self, candidates: Candidate_Index, entries: dict[int, tuple[np.ndarray, np.ndarray]], bandwidths: Bandwidths):
        self.candidates: Candidate_Index = candidates
        self.bandwidths: Bandwidths = bandwidths
        self._entries: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for order in ORDERS:
            indices, values = entries.get(order, (np.zeros((0, order), dtype=np.int64), np.zeros(0)))
            indices = np.asarray(indices, dtype=np.int64).reshape(-1, order)
            values = np.asarray(values, dtype=np.float64)
            assert len(indices) == len(values), f"Order {order} has {len(indices)} tuples but {len(values)} values"
            assert np.all(np.isfinite(values)) and np.all(values >= 0), f"Order {order} affinities must be finite and non-negative"
            self._entries[order] = (indices, values)
        self._lookup: dict[tuple[int, ...], float] | None = None

    def indices(self, order: int) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :return: (m, order) sorted candidate tuples of that order.
        """
        return self._entries[order][0]

    def values(self, order: int) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :return: (m,) affinities aligned with indices(order).
        """
        return self._entries[order][1]

    def entry_count(self, order: int) -> int:
        """
        :return: Number of stored tuples of the order.
        """
        return len(self._entries[order][1])

    @property
    def present_orders(self) -> tuple[int, ...]:
        """
        :return: Orders holding at least one positive affinity.
        """
        return tuple(o for o in ORDERS if np.any(self.values(o) > 0))

    def value(self, c1: int, c2: int, c3: int) -> float:
        """
        :return: H(c1, c2, c3); zero for tuples that were never stored.
        """
        if self._lookup is None:
            self._lookup = {}
            for order in ORDERS:
                indices, values = self._entries[order]
                for key, v in zip(map(tuple, indices.tolist()), values.tolist()):
                    self._lookup[key] = v
        key = tuple(sorted({c1, c2, c3}))
        return self._lookup.get(key, 0.0)

    def contract(self, order: int, x: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
        """
        :param order: 1, 2 or 3.
        :param x: Vector over candidates.
        :param weights: Optional per-entry multipliers aligned with values(order).
        :return: (H restricted to the order, times weights) contracted with x twice.
        """
        indices, values = self._entries[order]
        if weights is not None:
            values = values * weights
        return contract(order, indices, values, np.asarray(x, dtype=np.float64))

    @property
    def node_similarity(self) -> np.ndarray:
        """
        :return: (n_p, n_q) matrix of node similarities.
        """
        similarity = np.zeros(self.candidates.size)
        indices, values = self._entries[1]
        similarity[indices[:, 0]] = values
        return self.candidates.as_matrix(similarity)

    def __str__(self):
        counts = ", ".join(f"order {o}: {self.entry_count(o)}" for o in ORDERS)
        return f"Affinity over {self.candidates.n_p}x{self.candidates.n_q} candidates ({counts})"

    def __repr__(self):
        return str(self)


def _edge_geometry(graph: Group_Graph) -> np.ndarray:
    config = graph.feature_config
    geometry = np.zeros((len(graph), len(graph), config.n_l + config.n_p))
    for i, j in itertools.permutations(range(len(graph)), 2):
        geometry[i, j] = graph.directed_edge(i, j).geometry
    return geometry


def _angle_sines(graph: Group_Graph) -> np.ndarray:
    """(n, n, n) array whose [v, u, w] entry is the sine of the angle at v in triangle (v, u, w)."""
    n = len(graph)
    sines = np.zeros((n, n, n))
    for triple, hyper_edge in graph.hyper_edges.items():
        if hyper_edge.degenerate:
            continue
        for position, vertex in enumerate(triple):
            others = [v for v in triple if v != vertex]
            sines[vertex, others[0], others[1]] = sines[vertex, others[1], others[0]] = hyper_edge.internal_angle_sines[position]
    return sines


def _triple_features(geometry: np.ndarray, sines: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.concatenate([geometry[a, b], geometry[b, c], geometry[c, a],
                           sines[a, b, c][:, None], sines[b, c, a][:, None], sines[c, a, b][:, None]], axis=1)


class _Pair_Distances:
    """Squared distances between the node, edge and hyper-edge attributes of two graphs."""

    def __init__(self, g_p: Group_Graph, g_q: Group_Graph):
        self.g_p: Group_Graph = g_p
        self.g_q: Group_Graph = g_q
        self.node: np.ndarray = cdist(g_p.descriptor_matrix, g_q.descriptor_matrix, "sqeuclidean")
        self._geometry_p = _edge_geometry(g_p)
        self._geometry_q = _edge_geometry(g_q)
        ordered_q = np.array(list(itertools.permutations(range(len(g_q)), 2)), dtype=np.int64).reshape(-1, 2)
        self.q_edges: np.ndarray = ordered_q
        ordered_q_triples = np.array(list(itertools.permutations(range(len(g_q)), 3)), dtype=np.int64).reshape(-1, 3)
        self.q_triples: np.ndarray = ordered_q_triples
        self._q_triple_features = None
        self._sines_p = None

    def edges(self):
        """
        :return: Iterator of (i, j, d2) for every probe pair i < j, where d2 is aligned with q_edges.
        """
        qa, qb = self.q_edges[:, 0], self.q_edges[:, 1]
        q_geometry = self._geometry_q[qa, qb]
        for i, j in itertools.combinations(range(len(self.g_p)), 2):
            geometric = ((q_geometry - self._geometry_p[i, j]) ** 2).sum(axis=1)
            yield i, j, self.node[i, qa] + self.node[j, qb] + geometric

    def hyper_edges(self):
        """
        :return: Iterator of (i, j, k, d2) for every probe triple i < j < k, where d2 is aligned with q_triples.
        """
        if len(self.q_triples) == 0 or len(self.g_p) < 3:
            return
        ta, tb, tc = self.q_triples[:, 0], self.q_triples[:, 1], self.q_triples[:, 2]
        if self._q_triple_features is None:
            self._q_triple_features = _triple_features(self._geometry_q, _angle_sines(self.g_q), ta, tb, tc)
            self._sines_p = _angle_sines(self.g_p)
        for i, j, k in itertools.combinations(range(len(self.g_p)), 3):
            p_features = _triple_features(self._geometry_p, self._sines_p, np.array([i]), np.array([j]), np.array([k]))[0]
            geometric = ((self._q_triple_features - p_features) ** 2).sum(axis=1)
            yield i, j, k, self.node[i, ta] + self.node[j, tb] + self.node[k, tc] + geometric

    def medians(self) -> dict[int, float]:
        """
        :return: Median attribute distance of every order that has attributes on both sides.
        """
        medians = {1: float(np.median(np.sqrt(self.node)))}
        edge_distances = [d2 for _, _, d2 in self.edges()]
        if len(edge_distances) > 0 and len(self.q_edges) > 0:
            medians[2] = float(np.median(np.sqrt(np.concatenate(edge_distances))))
        triple_distances = [d2 for _, _, _, d2 in self.hyper_edges()]
        if len(triple_distances) > 0:
            medians[3] = float(np.median(np.sqrt(np.concatenate(triple_distances))))
        return medians


def calibrate_bandwidths(pairs: list[tuple[Group_Graph, Group_Graph]], samples: int = 64, seed: int = 0) -> Bandwidths:
    """
    Fix the similarity bandwidth of every order from a seeded sample of probe/gallery pairs.
    Each order's bandwidth is the median over the sampled pairs of their median attribute distance.
    :param pairs: Candidate (probe, gallery) graph pairs.
    :param samples: Number of pairs to sample.
    :param seed: Sampling seed.
    :return: The bandwidths. Orders with no attributes or a zero median get bandwidth 1.
    """
    usable = [(g_p, g_q) for g_p, g_q in pairs if len(g_p) > 0 and len(g_q) > 0]
    if len(usable) > samples:
        chosen = np.sort(np.random.default_rng(seed).choice(len(usable), size=samples, replace=False))
        usable = [usable[c] for c in chosen]
    per_order: dict[int, list[float]] = {o: [] for o in ORDERS}
    for g_p, g_q in usable:
        for order, median in _Pair_Distances(g_p, g_q).medians().items():
            per_order[order].append(median)
    widths = {}
    for order in ORDERS:
        width = float(np.median(per_order[order])) if len(per_order[order]) > 0 else 0.0
        widths[order] = width if width > 0.0 and np.isfinite(width) else 1.0
    bandwidths = Bandwidths(widths[1], widths[2], widths[3])
    logger.debug(f"Calibrated bandwidths from {len(usable)} pairs: {bandwidths}")
    return bandwidths


def _top(similarity: np.ndarray, k: int | None) -> np.ndarray:
    order = np.argsort(-similarity, kind="stable")
    if k is not None:
        order = order[:k]
    return order[similarity[order] > 0.0]


def build_affinity(g_p: Group_Graph, g_q: Group_Graph, config: Matcher_Config | None = None,
                   bandwidths: Bandwidths | None = None) -> Affinity_Tensor:
    """
    Build the multi-order affinity tensor of two groups with sim(x, y) = exp(-|x - y|^2 / sigma^2).
    :param g_p: Probe group graph.
    :param g_q: Gallery group graph.
    :param config: Matcher configuration; selects the orders and the sparsification.
    :param bandwidths: Per-order kernel bandwidths. Defaults to the medians of this pair alone.
    :return: The affinity tensor. Order 1 is always built since thresholding needs node similarities.
    """
    assert len(g_p) > 0 and len(g_q) > 0, f"Cannot match empty groups {g_p.group_id} and {g_q.group_id}"
    if config is None:
        config = Matcher_Config()
    if bandwidths is None:
        bandwidths = calibrate_bandwidths([(g_p, g_q)])
    candidates = Candidate_Index(len(g_p), len(g_q))
    distances = _Pair_Distances(g_p, g_q)
    n_q = len(g_q)
    entries: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    node_values = np.exp(-distances.node.ravel() / bandwidths.node ** 2)
    entries[1] = (np.arange(candidates.size, dtype=np.int64).reshape(-1, 1), node_values)
    if 2 in config.orders:
        edge_k = None if config.dense else config.top_k_edge
        tuples, values = [], []
        for i, j, d2 in distances.edges():
            similarity = np.exp(-d2 / bandwidths.edge ** 2)
            kept = _top(similarity, edge_k)
            qa, qb = distances.q_edges[kept, 0], distances.q_edges[kept, 1]
            tuples.append(np.stack([i * n_q + qa, j * n_q + qb], axis=1))
            values.append(similarity[kept])
        if len(tuples) > 0:
            entries[2] = (np.concatenate(tuples), np.concatenate(values))
    if 3 in config.orders:
        hyper_k = None if config.dense else config.top_k_hyper
        tuples, values = [], []
        for i, j, k, d2 in distances.hyper_edges():
            similarity = np.exp(-d2 / bandwidths.hyper ** 2)
            kept = _top(similarity, hyper_k)
            ta, tb, tc = (distances.q_triples[kept, p] for p in range(3))
            tuples.append(np.stack([i * n_q + ta, j * n_q + tb, k * n_q + tc], axis=1))
            values.append(similarity[kept])
        if len(tuples) > 0:
            entries[3] = (np.concatenate(tuples), np.concatenate(values))
    return Affinity_Tensor(candidates, entries, bandwidths)
