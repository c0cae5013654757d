"""Seeded generator of synthetic group pairs with known person correspondences."""
import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node
from groupmatch.group_features.Person_Descriptor import Person_Descriptor
from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config
from groupmatch.groupmatch_exceptions import Config_Exception
from groupmatch.reid_pipeline.ReId_Task import ReId_Task

logger = logging.getLogger(__name__)

PROBE_CAMERA = "A"
GALLERY_CAMERA = "B"


@dataclass(frozen=True)
class Synth_Config:
    """Parameters of a synthetic benchmark."""
    n_pairs: int = 20
    size_range: tuple[int, int] = (3, 10)
    layout_noise: float = 0.05
    feature_noise: float = 0.02
    churn_rate: float = 0.2
    distractor_count: int = 10
    seed: int = 0
    detection_jitter: float = 0.0
    view_change: float = 0.1
    palette_size: int = 12
    descriptor_blocks: int = 558
    bins: int = 16
    image_size: tuple[float, float] = (640.0, 360.0)

    def __post_init__(self):
        low, high = self.size_range
        if low < 1 or high < low:
            raise Config_Exception("synth.size_range", f"expected 1 <= low <= high, got {self.size_range}")
        if not 0.0 <= self.churn_rate <= 1.0:
            raise Config_Exception("synth.churn_rate", f"must lie in [0, 1], got {self.churn_rate}")
        for name in ("layout_noise", "feature_noise", "detection_jitter", "view_change"):
            if getattr(self, name) < 0:
                raise Config_Exception(f"synth.{name}", f"must be non-negative, got {getattr(self, name)}")
        if self.n_pairs < 0 or self.distractor_count < 0:
            raise Config_Exception("synth.n_pairs", "pair and distractor counts must be non-negative")
        if self.palette_size < 1 or self.descriptor_blocks < 1 or self.bins < 1:
            raise Config_Exception("synth.palette_size", "palette size, blocks and bins must be positive")


@dataclass(frozen=True)
class _Appearance:
    """Latent appearance: a popular palette prototype mixed with a personal histogram."""
    prototype: int
    weight: float
    personal: np.ndarray


class _Person_Factory:

    def __init__(self, config: Synth_Config, rng: np.random.Generator):
        self._config: Synth_Config = config
        self._rng: np.random.Generator = rng
        self._palette: np.ndarray = rng.dirichlet(np.full(config.bins, 0.5), size=(config.palette_size, config.descriptor_blocks))
        popularity = 1.0 / np.arange(1, config.palette_size + 1)
        self._popularity: np.ndarray = popularity / popularity.sum()
        self._count: int = 0

    def _new_id(self) -> str:
        person_id = f"P{self._count:05d}"
        self._count += 1
        return person_id

    def new_person(self) -> tuple[str, _Appearance]:
        """
        :return: A fresh identity and its appearance.
        """
        prototype = int(self._rng.choice(self._config.palette_size, p=self._popularity))
        personal = self._rng.dirichlet(np.full(self._config.bins, 0.5), size=self._config.descriptor_blocks)
        return self._new_id(), _Appearance(prototype, float(self._rng.uniform(0.3, 0.8)), personal)

    def look_alike(self, appearance: _Appearance) -> tuple[str, _Appearance]:
        """
        :return: A fresh identity whose appearance is close to the given one.
        """
        other = self._rng.dirichlet(np.full(self._config.bins, 0.5), size=self._config.descriptor_blocks)
        return self._new_id(), _Appearance(appearance.prototype, appearance.weight, 0.8 * appearance.personal + 0.2 * other)

    def descriptor(self, appearance: _Appearance, noise: float) -> np.ndarray:
        """
        :param appearance: The latent appearance.
        :param noise: Standard deviation of the per-value Gaussian noise.
        :return: Descriptor values with every block L1 normalized.
        """
        blocks = appearance.weight * self._palette[appearance.prototype] + (1.0 - appearance.weight) * appearance.personal
        if noise > 0.0:
            blocks = np.clip(blocks + self._rng.normal(0.0, noise, size=blocks.shape), 0.0, None)
        sums = blocks.sum(axis=1, keepdims=True)
        blocks = np.where(sums > 0.0, blocks / np.where(sums > 0.0, sums, 1.0), 1.0 / self._config.bins)
        return blocks.ravel()


def _base_layout(size: int, config: Synth_Config, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    width, height = config.image_size
    diagonal = math.hypot(width, height)
    angle = rng.uniform(-math.pi / 6.0, math.pi / 6.0)
    spacing = rng.uniform(0.04, 0.07) * diagonal
    direction = np.array([math.cos(angle), math.sin(angle)])
    normal = np.array([-direction[1], direction[0]])
    along = (np.arange(size) - (size - 1) / 2.0) * spacing
    across = rng.normal(0.0, 0.25 * spacing, size=size)
    center = np.array([width / 2.0 + rng.uniform(-0.1, 0.1) * width, height / 2.0 + rng.uniform(-0.1, 0.1) * height])
    return center + along[:, None] * direction + across[:, None] * normal, spacing


def _second_view(points: np.ndarray, spacing: float, config: Synth_Config, rng: np.random.Generator) -> np.ndarray:
    width, height = config.image_size
    diagonal = math.hypot(width, height)
    scale = 1.0 + rng.uniform(-config.view_change, config.view_change)
    rotation = rng.uniform(-config.view_change, config.view_change) * math.pi / 6.0
    shift = rng.uniform(-config.view_change, config.view_change, size=2) * np.array([width, height])
    moved = points.copy()
    if config.view_change > 0.0:
        cosine, sine = math.cos(rotation), math.sin(rotation)
        linear = scale * np.array([[cosine, -sine], [sine, cosine]])
        middle = np.array([width / 2.0, height / 2.0])
        moved = (points - middle) @ linear.T + middle + shift
    if config.layout_noise > 0.0:
        moved = moved + rng.normal(0.0, config.layout_noise * diagonal, size=moved.shape)
    if config.detection_jitter > 0.0:
        moved = moved + rng.normal(0.0, config.detection_jitter * spacing, size=moved.shape)
    return moved


def _graph(group_id: str, camera: str, people: list[tuple[str, np.ndarray, np.ndarray]], config: Synth_Config,
           feature_config: Feature_Config) -> Group_Graph:
    nodes = [Group_Node(person_id, (float(center[0]), float(center[1])), Person_Descriptor(values, config.bins))
             for person_id, center, values in people]
    return Group_Graph(group_id, camera, nodes, config.image_size, config=feature_config)


def generate_synthetic(config: Synth_Config | None = None, feature_config: Feature_Config | None = None) -> tuple[ReId_Task, dict[str, str]]:
    """
    Generate probe groups, their gallery views after a viewpoint change with layout noise, descriptor noise and
    membership churn, and distractor galleries that contain look-alikes of probe members.
    :param config: Generator parameters.
    :param feature_config: Feature configuration of the built graphs; its bin count is replaced by the generator's.
    :return: The labelled task and its ground truth.
    """
    if config is None:
        config = Synth_Config()
    feature_config = dataclasses.replace(feature_config if feature_config is not None else Feature_Config(), bins=config.bins)
    rng = np.random.default_rng(config.seed)
    factory = _Person_Factory(config, rng)
    low, high = config.size_range
    probes, galleries = [], []
    ground_truth, correspondences = {}, {}
    members_of_probes: list[list[tuple[str, _Appearance]]] = []
    for k in range(config.n_pairs):
        size = int(rng.integers(low, high + 1))
        members = [factory.new_person() for _ in range(size)]
        members_of_probes.append(members)
        points, spacing = _base_layout(size, config, rng)
        probe_people = [(pid, points[m], factory.descriptor(look, 0.0)) for m, (pid, look) in enumerate(members)]
        gallery_members = []
        for member in members:
            gallery_members.append(factory.new_person() if rng.random() < config.churn_rate else member)
        gallery_points = _second_view(points, spacing, config, rng)
        gallery_people = [(pid, gallery_points[m], factory.descriptor(look, config.feature_noise))
                          for m, (pid, look) in enumerate(gallery_members)]
        order = rng.permutation(size)
        gallery_people = [gallery_people[o] for o in order]
        probe_id, gallery_id = f"pA-{k:03d}", f"gB-{k:03d}"
        probes.append(_graph(probe_id, PROBE_CAMERA, probe_people, config, feature_config))
        galleries.append(_graph(gallery_id, GALLERY_CAMERA, gallery_people, config, feature_config))
        ground_truth[probe_id] = gallery_id
        kept = {pid for pid, _ in members} & {pid for pid, _, _ in gallery_people}
        correspondences[(probe_id, gallery_id)] = tuple((pid, pid) for pid, _ in members if pid in kept)
    for d in range(config.distractor_count):
        if len(members_of_probes) > 0:
            source = members_of_probes[int(rng.integers(len(members_of_probes)))]
            members = [factory.look_alike(look) if rng.random() < 0.5 else factory.new_person() for _, look in source]
        else:
            members = [factory.new_person() for _ in range(int(rng.integers(low, high + 1)))]
        points, spacing = _base_layout(len(members), config, rng)
        points = _second_view(points, spacing, config, rng)
        people = [(pid, points[m], factory.descriptor(look, config.feature_noise)) for m, (pid, look) in enumerate(members)]
        galleries.append(_graph(f"dB-{d:03d}", GALLERY_CAMERA, people, config, feature_config))
    task = ReId_Task(tuple(probes), tuple(galleries), ground_truth, correspondences)
    logger.info(f"Generated {task}")
    return task, dict(ground_truth)
