"""Binary little-endian cache of extracted group graphs: magic, version, then groups of person centres and descriptors."""
import io
import struct
from typing import BinaryIO

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node
from groupmatch.group_features.Person_Descriptor import Person_Descriptor
from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config
from groupmatch.groupmatch_exceptions import Descriptor_Cache_Exception

CACHE_MAGIC = b"GMDC"
CACHE_VERSION = 1


def _write_text(stream: BinaryIO, text: str):
    encoded = text.encode("utf-8")
    stream.write(struct.pack("<H", len(encoded)))
    stream.write(encoded)


def _read_exact(stream: BinaryIO, count: int, path: str) -> bytes:
    data = stream.read(count)
    if len(data) != count:
        raise Descriptor_Cache_Exception(path, "file is truncated")
    return data


def _read_text(stream: BinaryIO, path: str) -> str:
    (length,) = struct.unpack("<H", _read_exact(stream, 2, path))
    return _read_exact(stream, length, path).decode("utf-8")


def cache_bytes(graphs: list[Group_Graph]) -> bytes:
    """
    :param graphs: Group graphs to store.
    :return: The cache file contents.
    """
    stream = io.BytesIO()
    stream.write(CACHE_MAGIC)
    stream.write(struct.pack("<HI", CACHE_VERSION, len(graphs)))
    for graph in graphs:
        _write_text(stream, graph.group_id)
        _write_text(stream, graph.camera)
        dimension = graph.descriptor_matrix.shape[1] if len(graph) > 0 else 0
        bins = graph.nodes[0].descriptor.bins if len(graph) > 0 else graph.feature_config.bins
        stream.write(struct.pack("<ddIIH", graph.image_size[0], graph.image_size[1], len(graph), dimension, bins))
        stream.write(struct.pack("<dd", *graph.reference_direction))
        has_global = graph.global_descriptor is not None
        stream.write(struct.pack("<B", int(has_global)))
        if has_global:
            stream.write(struct.pack("<I", len(graph.global_descriptor.values)))
            stream.write(np.asarray(graph.global_descriptor.values, dtype="<f8").tobytes())
        for node in graph.nodes:
            _write_text(stream, node.person_id)
            stream.write(struct.pack("<dd", node.center[0], node.center[1]))
            stream.write(np.asarray(node.descriptor.values, dtype="<f8").tobytes())
    return stream.getvalue()


def write_descriptor_cache(graphs: list[Group_Graph], path: str):
    """
    :param graphs: Group graphs to store.
    :param path: Output path.
    """
    with open(path, "wb") as cache_file:
        cache_file.write(cache_bytes(graphs))


def read_descriptor_cache(path: str, config: Feature_Config | None = None) -> list[Group_Graph]:
    """
    :param path: Path of a cache written by write_descriptor_cache.
    :param config: Feature configuration of the rebuilt graphs.
    :return: The stored group graphs; edges and hyper-edges are recomputed from the people.
    """
    graphs = []
    with open(path, "rb") as stream:
        if stream.read(4) != CACHE_MAGIC:
            raise Descriptor_Cache_Exception(path, "not a descriptor cache (bad magic)")
        version, count = struct.unpack("<HI", _read_exact(stream, 6, path))
        if version != CACHE_VERSION:
            raise Descriptor_Cache_Exception(path, f"unsupported version {version}")
        for _ in range(count):
            group_id = _read_text(stream, path)
            camera = _read_text(stream, path)
            width, height, people, dimension, bins = struct.unpack("<ddIIH", _read_exact(stream, 26, path))
            reference = np.array(struct.unpack("<dd", _read_exact(stream, 16, path)))
            global_descriptor = None
            if struct.unpack("<B", _read_exact(stream, 1, path))[0]:
                (length,) = struct.unpack("<I", _read_exact(stream, 4, path))
                global_descriptor = Person_Descriptor(np.frombuffer(_read_exact(stream, 8 * length, path), dtype="<f8").astype(np.float64), bins)
            nodes = []
            for _ in range(people):
                person_id = _read_text(stream, path)
                cx, cy = struct.unpack("<dd", _read_exact(stream, 16, path))
                values = np.frombuffer(_read_exact(stream, 8 * dimension, path), dtype="<f8").astype(np.float64)
                nodes.append(Group_Node(person_id, (cx, cy), Person_Descriptor(values, bins)))
            graphs.append(Group_Graph(group_id, camera, nodes, (width, height), reference, config,
                                      global_descriptor=global_descriptor))
    return graphs
