"""Reading, validating and writing manifest documents that describe annotated group re-identification datasets."""
import json
import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from PIL import Image

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node
from groupmatch.group_features.Person_Descriptor import Box_Kind, Person_Crop, Person_Descriptor, body_box, extract_person_descriptor
from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config
from groupmatch.groupmatch_exceptions import Manifest_Validation_Exception, Missing_Image_Exception
from groupmatch.groupmatch_warnings import Weak_Group_Pair_Warning
from groupmatch.reid_pipeline.ReId_Task import ReId_Task

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Manifest_Person:
    """An annotated person."""
    person_id: str
    box: tuple[float, float, float, float]
    kind: Box_Kind = Box_Kind.Body
    descriptor: tuple[float, ...] | None = None
    center: tuple[float, float] | None = None


@dataclass(frozen=True)
class Manifest_Group:
    """An annotated group image."""
    group_id: str
    camera: str
    image_size: tuple[float, float]
    persons: tuple[Manifest_Person, ...]
    image_path: str | None = None

    @property
    def image_free(self) -> bool:
        """
        :return: True if every person carries a precomputed descriptor.
        """
        return all(p.descriptor is not None for p in self.persons)


@dataclass(frozen=True)
class Manifest_Pair:
    """A labelled probe/gallery pair with its person correspondences."""
    probe_group_id: str
    gallery_group_id: str
    person_correspondences: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Manifest:
    """A validated manifest document."""
    probe_camera: str
    gallery_camera: str
    groups: tuple[Manifest_Group, ...]
    pairs: tuple[Manifest_Pair, ...] = ()
    version: int = MANIFEST_VERSION
    base_dir: str = field(default=".", compare=False)

    @property
    def group_map(self) -> dict[str, Manifest_Group]:
        """
        :return: Groups keyed by id.
        """
        return {g.group_id: g for g in self.groups}


def _require(document: dict, key: str, pointer: str, kind: type) -> Any:
    if not isinstance(document, dict):
        raise Manifest_Validation_Exception(pointer, "expected an object")
    if key not in document:
        raise Manifest_Validation_Exception(f"{pointer}/{key}", "missing required value")
    value = document[key]
    if not isinstance(value, kind) or (isinstance(value, bool) and kind is not bool):
        raise Manifest_Validation_Exception(f"{pointer}/{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _numbers(value: Any, count: int | None, pointer: str) -> tuple[float, ...]:
    if not isinstance(value, list) or (count is not None and len(value) != count):
        raise Manifest_Validation_Exception(pointer, f"expected a list of {count if count is not None else 'some'} numbers")
    for index, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
            raise Manifest_Validation_Exception(f"{pointer}/{index}", "expected a finite number")
    return tuple(float(v) for v in value)


def _validate_person(document: Any, pointer: str, image_size: tuple[float, float]) -> Manifest_Person:
    person_id = _require(document, "personId", pointer, str)
    box = _numbers(_require(document, "box", pointer, list), 4, f"{pointer}/box")
    x, y, w, h = box
    if w <= 0 or h <= 0:
        raise Manifest_Validation_Exception(f"{pointer}/box", "box width and height must be positive")
    width, height = image_size
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise Manifest_Validation_Exception(f"{pointer}/box", f"box {list(box)} is outside the {width}x{height} image")
    kind_name = document.get("kind", "body")
    try:
        kind = Box_Kind(kind_name)
    except ValueError:
        raise Manifest_Validation_Exception(f"{pointer}/kind", f"expected 'head' or 'body', got {kind_name!r}")
    descriptor = None
    if "descriptor" in document:
        descriptor = _numbers(document["descriptor"], None, f"{pointer}/descriptor")
        if len(descriptor) == 0 or any(v < 0 for v in descriptor):
            raise Manifest_Validation_Exception(f"{pointer}/descriptor", "expected a non-empty, non-negative histogram")
    center = _numbers(document["center"], 2, f"{pointer}/center") if "center" in document else None
    return Manifest_Person(person_id, (x, y, w, h), kind, descriptor, center)


def validate_manifest(document: Any, base_dir: str = ".") -> Manifest:
    """
    :param document: Decoded JSON manifest.
    :param base_dir: Directory against which relative image paths are resolved.
    :return: The validated manifest.
    """
    if not isinstance(document, dict):
        raise Manifest_Validation_Exception("", "expected an object")
    version = _require(document, "version", "", int)
    if version != MANIFEST_VERSION:
        raise Manifest_Validation_Exception("/version", f"unsupported version {version}; expected {MANIFEST_VERSION}")
    cameras = _require(document, "cameras", "", dict)
    probe_camera = _require(cameras, "probe", "/cameras", str)
    gallery_camera = _require(cameras, "gallery", "/cameras", str)
    if probe_camera == gallery_camera:
        raise Manifest_Validation_Exception("/cameras", "probe and gallery cameras must differ")
    raw_groups = _require(document, "groups", "", list)
    if len(raw_groups) == 0:
        raise Manifest_Validation_Exception("/groups", "no groups")
    groups, seen = [], set()
    for g_index, raw_group in enumerate(raw_groups):
        pointer = f"/groups/{g_index}"
        group_id = _require(raw_group, "groupId", pointer, str)
        if group_id in seen:
            raise Manifest_Validation_Exception(f"{pointer}/groupId", f"duplicate group id {group_id!r}")
        seen.add(group_id)
        camera = _require(raw_group, "camera", pointer, str)
        if camera not in (probe_camera, gallery_camera):
            raise Manifest_Validation_Exception(f"{pointer}/camera", f"unknown camera {camera!r}")
        image_size = _numbers(_require(raw_group, "imageSize", pointer, list), 2, f"{pointer}/imageSize")
        if image_size[0] <= 0 or image_size[1] <= 0:
            raise Manifest_Validation_Exception(f"{pointer}/imageSize", "image size must be positive")
        image_path = raw_group.get("imagePath")
        if image_path is not None and not isinstance(image_path, str):
            raise Manifest_Validation_Exception(f"{pointer}/imagePath", "expected a string")
        raw_persons = _require(raw_group, "persons", pointer, list)
        if len(raw_persons) == 0:
            raise Manifest_Validation_Exception(f"{pointer}/persons", "a group needs at least one person")
        persons = [_validate_person(p, f"{pointer}/persons/{p_index}", (image_size[0], image_size[1]))
                   for p_index, p in enumerate(raw_persons)]
        person_ids = [p.person_id for p in persons]
        if len(set(person_ids)) != len(person_ids):
            raise Manifest_Validation_Exception(f"{pointer}/persons", "person ids are not unique within the group")
        group = Manifest_Group(group_id, camera, (image_size[0], image_size[1]), tuple(persons), image_path)
        if image_path is None and not group.image_free:
            raise Manifest_Validation_Exception(f"{pointer}/imagePath", "required unless every person has a descriptor")
        groups.append(group)
    by_id = {g.group_id: g for g in groups}
    pairs = []
    for pair_index, raw_pair in enumerate(document.get("pairs", [])):
        pointer = f"/pairs/{pair_index}"
        probe_id = _require(raw_pair, "probeGroupId", pointer, str)
        gallery_id = _require(raw_pair, "galleryGroupId", pointer, str)
        if probe_id not in by_id or by_id[probe_id].camera != probe_camera:
            raise Manifest_Validation_Exception(f"{pointer}/probeGroupId", f"no probe group {probe_id!r}")
        if gallery_id not in by_id or by_id[gallery_id].camera != gallery_camera:
            raise Manifest_Validation_Exception(f"{pointer}/galleryGroupId", f"no gallery group {gallery_id!r}")
        if any(p.probe_group_id == probe_id for p in pairs):
            raise Manifest_Validation_Exception(f"{pointer}/probeGroupId", f"probe {probe_id!r} is labelled twice")
        correspondences = []
        probe_people = {p.person_id for p in by_id[probe_id].persons}
        gallery_people = {p.person_id for p in by_id[gallery_id].persons}
        for c_index, raw in enumerate(raw_pair.get("personCorrespondences", [])):
            c_pointer = f"{pointer}/personCorrespondences/{c_index}"
            if not isinstance(raw, list) or len(raw) != 2 or not all(isinstance(v, str) for v in raw):
                raise Manifest_Validation_Exception(c_pointer, "expected a [probePersonId, galleryPersonId] pair")
            if raw[0] not in probe_people or raw[1] not in gallery_people:
                raise Manifest_Validation_Exception(c_pointer, f"unknown person in {raw}")
            correspondences.append((raw[0], raw[1]))
        if len({p for p, _ in correspondences}) != len(correspondences) or len({q for _, q in correspondences}) != len(correspondences):
            raise Manifest_Validation_Exception(f"{pointer}/personCorrespondences", "correspondences are not one-to-one")
        pairs.append(Manifest_Pair(probe_id, gallery_id, tuple(correspondences)))
    manifest = Manifest(probe_camera, gallery_camera, tuple(groups), tuple(pairs), version, base_dir)
    check_group_identity(manifest)
    return manifest


def check_group_identity(manifest: Manifest):
    """
    Warn about labelled pairs whose shared people are not more than a quarter of the people in either group.
    :param manifest: A validated manifest.
    """
    groups = manifest.group_map
    for pair in manifest.pairs:
        shared = len(pair.person_correspondences)
        total = len(groups[pair.probe_group_id].persons) + len(groups[pair.gallery_group_id].persons) - shared
        if 4 * shared <= total:
            warnings.warn(Weak_Group_Pair_Warning(pair.probe_group_id, pair.gallery_group_id, shared, total))


def read_manifest(path: str) -> Manifest:
    """
    :param path: Path to a manifest JSON file.
    :return: The validated manifest.
    """
    try:
        with open(path, "r", encoding="utf-8") as manifest_file:
            document = json.load(manifest_file)
    except json.JSONDecodeError as e:
        raise Manifest_Validation_Exception("", f"not valid JSON: {e}")
    return validate_manifest(document, os.path.dirname(os.path.abspath(path)))


def manifest_to_dict(manifest: Manifest) -> dict:
    """
    :param manifest: A manifest.
    :return: The JSON document of the manifest.
    """
    groups = []
    for group in manifest.groups:
        persons = []
        for person in group.persons:
            entry: dict[str, Any] = {"personId": person.person_id, "box": list(person.box), "kind": person.kind.value}
            if person.descriptor is not None:
                entry["descriptor"] = list(person.descriptor)
            if person.center is not None:
                entry["center"] = list(person.center)
            persons.append(entry)
        document: dict[str, Any] = {"groupId": group.group_id, "camera": group.camera, "imageSize": list(group.image_size)}
        if group.image_path is not None:
            document["imagePath"] = group.image_path
        document["persons"] = persons
        groups.append(document)
    return {"version": manifest.version,
            "cameras": {"probe": manifest.probe_camera, "gallery": manifest.gallery_camera},
            "groups": groups,
            "pairs": [{"probeGroupId": p.probe_group_id, "galleryGroupId": p.gallery_group_id,
                       "personCorrespondences": [list(c) for c in p.person_correspondences]} for p in manifest.pairs]}


def write_manifest(manifest: Manifest, path: str):
    """
    :param manifest: A manifest.
    :param path: Output path of the JSON document.
    """
    with open(path, "w", encoding="utf-8") as manifest_file:
        json.dump(manifest_to_dict(manifest), manifest_file, indent=1)
        manifest_file.write("\n")


def _load_image(manifest: Manifest, group: Manifest_Group) -> np.ndarray:
    path = group.image_path if os.path.isabs(group.image_path) else os.path.join(manifest.base_dir, group.image_path)
    if not os.path.isfile(path):
        raise Missing_Image_Exception(path)
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"))


def _person_center(person: Manifest_Person, image_size: tuple[float, float], config: Feature_Config) -> tuple[float, float]:
    if person.center is not None:
        return person.center
    x, y, w, h = body_box(person.box, (int(image_size[0]), int(image_size[1])), person.kind, config)
    return x + w / 2.0, y + h / 2.0


def group_graph(manifest: Manifest, group: Manifest_Group, config: Feature_Config | None = None,
                cached: Group_Graph | None = None, seed: int = 0) -> Group_Graph:
    """
    :param manifest: The manifest holding the group.
    :param group: The group to build.
    :param config: Feature configuration.
    :param cached: A previously extracted graph of the same group; its descriptors are reused.
    :param seed: Seed of the reference direction fit.
    :return: The group graph with descriptors extracted from the image, taken from the manifest or taken from the cache.
    """
    if config is None:
        config = Feature_Config()
    if cached is not None:
        return cached
    global_descriptor = None
    if group.image_free:
        descriptors = [Person_Descriptor(np.array(p.descriptor, dtype=np.float64), config.bins) for p in group.persons]
    else:
        image = _load_image(manifest, group)
        descriptors = [extract_person_descriptor(Person_Crop.from_group_image(image, p.box, index, p.kind, config), config)
                       for index, p in enumerate(group.persons)]
        boxes = np.array([body_box(p.box, (image.shape[1], image.shape[0]), p.kind, config) for p in group.persons])
        x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
        x1, y1 = (boxes[:, 0] + boxes[:, 2]).max(), (boxes[:, 1] + boxes[:, 3]).max()
        union = Person_Crop.from_group_image(image, (x0, y0, x1 - x0, y1 - y0), -1, Box_Kind.Body, config)
        global_descriptor = extract_person_descriptor(union, config)
    nodes = [Group_Node(p.person_id, _person_center(p, group.image_size, config), d) for p, d in zip(group.persons, descriptors)]
    return Group_Graph(group.group_id, group.camera, nodes, group.image_size, config=config, seed=seed,
                       global_descriptor=global_descriptor)


def manifest_graphs(manifest: Manifest, config: Feature_Config | None = None, limit: int | None = None,
                    cache: dict[str, Group_Graph] | None = None, seed: int = 0) -> list[Group_Graph]:
    """
    :param manifest: A validated manifest.
    :param config: Feature configuration.
    :param limit: Maximum number of groups to build, in manifest order.
    :param cache: Previously extracted graphs keyed by group id.
    :param seed: Seed of the reference direction fits.
    :return: The group graphs in manifest order.
    """
    groups = manifest.groups if limit is None else manifest.groups[:limit]
    graphs = []
    for group in groups:
        graphs.append(group_graph(manifest, group, config, None if cache is None else cache.get(group.group_id), seed))
        logger.debug(f"Built {graphs[-1]}")
    return graphs


def task_from_graphs(manifest: Manifest, graphs: list[Group_Graph]) -> ReId_Task:
    """
    :param manifest: The manifest the graphs were built from.
    :param graphs: Graphs of some or all manifest groups.
    :return: The task of those graphs; labels of pairs with a missing group are dropped.
    """
    probes = tuple(g for g in graphs if g.camera == manifest.probe_camera)
    galleries = tuple(g for g in graphs if g.camera == manifest.gallery_camera)
    present = {g.group_id for g in graphs}
    kept = [p for p in manifest.pairs if p.probe_group_id in present and p.gallery_group_id in present]
    return ReId_Task(probes, galleries, {p.probe_group_id: p.gallery_group_id for p in kept},
                     {(p.probe_group_id, p.gallery_group_id): p.person_correspondences for p in kept})


def load_manifest(path: str, config: Feature_Config | None = None, limit: int | None = None,
                  cache: dict[str, Group_Graph] | None = None) -> ReId_Task:
    """
    :param path: Path to a manifest JSON file.
    :param config: Feature configuration.
    :param limit: Maximum number of groups to build.
    :param cache: Previously extracted graphs keyed by group id.
    :return: The re-identification task described by the manifest.
    """
    manifest = read_manifest(path)
    return task_from_graphs(manifest, manifest_graphs(manifest, config, limit, cache))


def task_to_manifest(task: ReId_Task, probe_camera: str | None = None, gallery_camera: str | None = None) -> Manifest:
    """
    :param task: A task.
    :param probe_camera: Camera name of the probes. Defaults to the camera of the first probe, or "A".
    :param gallery_camera: Camera name of the galleries. Defaults to the camera of the first gallery, or "B".
    :return: An image-free manifest holding every person's centre and descriptor.
    """
    if probe_camera is None:
        probe_camera = task.probes[0].camera if len(task.probes) > 0 else "A"
    if gallery_camera is None:
        gallery_camera = task.galleries[0].camera if len(task.galleries) > 0 else "B"
    probe_ids = {g.group_id for g in task.probes}
    groups = []
    for graph in list(task.probes) + list(task.galleries):
        width, height = graph.image_size
        persons = []
        for node in graph.nodes:
            cx, cy = node.center
            x, y = min(max(cx - 0.5, 0.0), width - 1.0), min(max(cy - 0.5, 0.0), height - 1.0)
            persons.append(Manifest_Person(node.person_id, (x, y, 1.0, 1.0), Box_Kind.Body,
                                           tuple(float(v) for v in node.descriptor.values), (float(cx), float(cy))))
        camera = probe_camera if graph.group_id in probe_ids else gallery_camera
        groups.append(Manifest_Group(graph.group_id, camera, graph.image_size, tuple(persons)))
    pairs = tuple(Manifest_Pair(p, g, tuple(task.correspondences.get((p, g), ()))) for p, g in task.labelled_pairs)
    return Manifest(probe_camera, gallery_camera, tuple(groups), pairs)
