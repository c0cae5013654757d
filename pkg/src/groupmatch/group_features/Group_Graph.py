"""Module containing the Group_Graph class: people of one group image with their pair and triple attributes."""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from groupmatch.group_features.Person_Descriptor import Person_Descriptor, mean_descriptor
from groupmatch.group_features.reference_direction import fit_reference_direction
from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config

_Collinear_Tolerance = 1e-9


@dataclass(frozen=True)
class Group_Node:
    """A person in a group image."""
    person_id: str
    center: tuple[float, float]
    descriptor: Person_Descriptor


@dataclass(frozen=True)
class Edge_Attribute:
    """Log-distance and polar-angle histograms of the directed edge source -> target."""
    source: int
    target: int
    log_distance_hist: np.ndarray
    polar_angle_hist: np.ndarray
    log_distance: float
    polar_angle: float

    @property
    def geometry(self) -> np.ndarray:
        """
        :return: The concatenation [L; P].
        """
        return np.concatenate([self.log_distance_hist, self.polar_angle_hist])

    def composite(self, graph) -> np.ndarray:
        """
        :param graph: The Group_Graph that owns this edge.
        :return: The concatenation [A_source; A_target; L; P].
        """
        return np.concatenate([graph.nodes[self.source].descriptor.values, graph.nodes[self.target].descriptor.values,
                               self.log_distance_hist, self.polar_angle_hist])


@dataclass(frozen=True)
class Hyper_Edge_Attribute:
    """Internal angles of the triangle formed by three people, in vertex order."""
    vertices: tuple[int, int, int]
    internal_angles: tuple[float, float, float]
    internal_angle_sines: np.ndarray
    degenerate: bool

    def composite(self, graph) -> np.ndarray:
        """
        :param graph: The Group_Graph that owns this hyper-edge.
        :return: [A_i; A_j; A_k; L_ij; P_ij; L_jk; P_jk; L_ki; P_ki; I_ijk] for vertices (i, j, k).
        """
        i, j, k = self.vertices
        parts = [graph.nodes[v].descriptor.values for v in self.vertices]
        for s, t in ((i, j), (j, k), (k, i)):
            parts.append(graph.directed_edge(s, t).geometry)
        parts.append(self.internal_angle_sines)
        return np.concatenate(parts)


def gaussian_window(center_bin: int, bin_count: int, sigma: float, circular: bool = False) -> np.ndarray:
    """
    :param center_bin: The bin the window is centred on.
    :param bin_count: Number of bins.
    :param sigma: Standard deviation of the window in bins.
    :param circular: If true, distances between bins wrap around.
    :return: L1 normalized discrete Gaussian over the bins.
    """
    offsets = np.abs(np.arange(bin_count) - center_bin).astype(np.float64)
    if circular:
        offsets = np.minimum(offsets, bin_count - offsets)
    window = np.exp(-offsets ** 2 / (2.0 * sigma ** 2))
    return window / window.sum()


def edge_attribute(gi, i: int, j: int, config: Feature_Config | None = None) -> Edge_Attribute:
    """
    :param gi: The group graph, or any object exposing centers, reference_direction and diagonal.
    :param i: Index of the source node.
    :param j: Index of the target node.
    :param config: Feature configuration with bin counts and window widths.
    :return: The attribute of the directed edge i -> j.
    """
    assert i != j, f"An edge needs two distinct nodes, got {i} twice"
    if config is None:
        config = Feature_Config()
    centers = gi.centers
    delta = centers[j] - centers[i]
    diagonal = max(gi.diagonal, 1.0)
    distance = float(np.hypot(delta[0], delta[1]))
    log_low = math.log(config.rho_floor)
    log_rho = math.log(min(max(distance / diagonal, config.rho_floor), 1.0))
    distance_bin = int(math.floor((log_rho - log_low) / (0.0 - log_low) * config.n_l))
    distance_bin = min(max(distance_bin, 0), config.n_l - 1)
    reference = gi.reference_direction
    theta = (math.atan2(delta[1], delta[0]) - math.atan2(reference[1], reference[0])) % (2.0 * math.pi)
    angle_bin = int(math.floor(theta / (2.0 * math.pi / config.n_p))) % config.n_p
    return Edge_Attribute(source=i, target=j,
                          log_distance_hist=gaussian_window(distance_bin, config.n_l, config.sigma_l),
                          polar_angle_hist=gaussian_window(angle_bin, config.n_p, config.sigma_p, circular=True),
                          log_distance=log_rho, polar_angle=theta)


def _angle_at(vertex: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    u, w = p - vertex, q - vertex
    cosine = float(np.dot(u, w) / (np.linalg.norm(u) * np.linalg.norm(w)))
    return math.acos(min(max(cosine, -1.0), 1.0))


def hyper_edge_attribute(gi, i: int, j: int, k: int) -> Hyper_Edge_Attribute:
    """
    :param gi: The group graph, or any object exposing centers.
    :param i: First vertex.
    :param j: Second vertex.
    :param k: Third vertex.
    :return: Internal angles of triangle (i, j, k) listed at i, j, k. Collinear triangles get angles with pi at the
        middle vertex, zero sines and the degenerate flag.
    """
    assert len({i, j, k}) == 3, f"A hyper-edge needs three distinct nodes, got {(i, j, k)}"
    points = [gi.centers[v] for v in (i, j, k)]
    a, b, c = points
    ab, ac = b - a, c - a
    cross = float(ab[0] * ac[1] - ab[1] * ac[0])
    lengths = [float(np.linalg.norm(b - a)), float(np.linalg.norm(c - b)), float(np.linalg.norm(a - c))]
    scale = max(lengths) ** 2
    if scale == 0.0 or abs(cross) <= _Collinear_Tolerance * scale or min(lengths) == 0.0:
        # the longest side is opposite the straight angle
        opposite = [lengths[1], lengths[2], lengths[0]]
        middle = int(np.argmax(opposite))
        angles = [0.0, 0.0, 0.0]
        angles[middle] = math.pi
        return Hyper_Edge_Attribute((i, j, k), (angles[0], angles[1], angles[2]), np.zeros(3), True)
    angles = (_angle_at(a, b, c), _angle_at(b, c, a), _angle_at(c, a, b))
    return Hyper_Edge_Attribute((i, j, k), angles, np.sin(np.array(angles)), False)


class Group_Graph:
    """
    The people of one group image as nodes, every pair as an edge and every triple as a hyper-edge.
    Immutable after construction.
    """

    def __init__(self, group_id: str, camera: str, nodes: list[Group_Node], image_size: tuple[float, float],
                 reference_direction: np.ndarray | None = None, config: Feature_Config | None = None, seed: int = 0,
                 global_descriptor: Person_Descriptor | None = None):
        if config is None:
            config = Feature_Config()
        self.group_id: str = group_id
        self.camera: str = camera
        self._nodes: tuple[Group_Node, ...] = tuple(nodes)
        self.image_size: tuple[float, float] = (float(image_size[0]), float(image_size[1]))
        self.feature_config: Feature_Config = config
        self._centers: np.ndarray = np.array([n.center for n in self._nodes], dtype=np.float64).reshape(-1, 2)
        if reference_direction is None:
            reference_direction = fit_reference_direction([n.center for n in self._nodes], self.image_size,
                                                          trials=config.ransac_trials, threshold=config.ransac_threshold,
                                                          seed=seed) if len(self._nodes) > 0 else np.array([1.0, 0.0])
        self._reference_direction: np.ndarray = np.asarray(reference_direction, dtype=np.float64)
        self._directed_edges: dict[tuple[int, int], Edge_Attribute] = {(s, t): edge_attribute(self, s, t, config)
                                                                       for s, t in itertools.permutations(range(len(self._nodes)), 2)}
        self._hyper_edges: dict[tuple[int, int, int], Hyper_Edge_Attribute] = {triple: hyper_edge_attribute(self, *triple)
                                                                               for triple in itertools.combinations(range(len(self._nodes)), 3)}
        self._descriptor_matrix: np.ndarray | None = None
        self.global_descriptor: Person_Descriptor | None = global_descriptor

    @property
    def nodes(self) -> tuple[Group_Node, ...]:
        """
        :return: The people of the group in index order.
        """
        return self._nodes

    @property
    def centers(self) -> np.ndarray:
        """
        :return: (n, 2) array of person centres.
        """
        return self._centers

    @property
    def reference_direction(self) -> np.ndarray:
        """
        :return: Unit vector along the fitted group line.
        """
        return self._reference_direction

    @property
    def diagonal(self) -> float:
        """
        :return: Length of the diagonal of the group image in pixels.
        """
        return math.hypot(*self.image_size)

    @property
    def person_ids(self) -> list[str]:
        """
        :return: Person identifiers in node order.
        """
        return [n.person_id for n in self._nodes]

    @property
    def descriptor_matrix(self) -> np.ndarray:
        """
        :return: (n, D) array of the node descriptors.
        """
        if self._descriptor_matrix is None:
            self._descriptor_matrix = np.array([n.descriptor.values for n in self._nodes], dtype=np.float64)
        return self._descriptor_matrix

    @property
    def edges(self) -> dict[tuple[int, int], Edge_Attribute]:
        """
        :return: Attributes of every unordered pair (i, j), i < j, stored in the direction i -> j.
        """
        return {(i, j): e for (i, j), e in self._directed_edges.items() if i < j}

    @property
    def hyper_edges(self) -> dict[tuple[int, int, int], Hyper_Edge_Attribute]:
        """
        :return: Attributes of every unordered triple (i, j, k), i < j < k.
        """
        return dict(self._hyper_edges)

    def directed_edge(self, i: int, j: int) -> Edge_Attribute:
        """
        :param i: Source node.
        :param j: Target node.
        :return: The attribute of edge i -> j.
        """
        return self._directed_edges[(i, j)]

    def ordered_hyper_edge(self, i: int, j: int, k: int) -> Hyper_Edge_Attribute:
        """
        :return: The hyper-edge attribute with angles listed in the vertex order (i, j, k).
        """
        canonical = self._hyper_edges[tuple(sorted((i, j, k)))]
        lookup = dict(zip(canonical.vertices, canonical.internal_angles))
        angles = (lookup[i], lookup[j], lookup[k])
        sines = np.zeros(3) if canonical.degenerate else np.sin(np.array(angles))
        return Hyper_Edge_Attribute((i, j, k), angles, sines, canonical.degenerate)

    def global_graph(self):
        """
        :return: A single-node graph whose descriptor summarizes the whole group.
            Without a whole-group descriptor the mean of the people's descriptors is used.
        """
        centroid = tuple(self._centers.mean(axis=0)) if len(self._nodes) > 0 else (self.image_size[0] / 2.0, self.image_size[1] / 2.0)
        descriptor = self.global_descriptor if self.global_descriptor is not None else mean_descriptor([n.descriptor for n in self._nodes])
        node = Group_Node(f"{self.group_id}:global", (float(centroid[0]), float(centroid[1])), descriptor)
        return Group_Graph(self.group_id, self.camera, [node], self.image_size, np.array([1.0, 0.0]), self.feature_config)

    def __len__(self) -> int:
        return len(self._nodes)

    def __str__(self):
        return f"Group {self.group_id} ({self.camera}) with {len(self)} people"

    def __repr__(self):
        return str(self)
