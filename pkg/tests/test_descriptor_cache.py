"""Tests of the binary descriptor cache and JSON group graph documents."""
import json
import os
import tempfile
from unittest import TestCase

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node
from groupmatch.group_features.Person_Descriptor import Person_Descriptor
from groupmatch.groupmatch_exceptions import Descriptor_Cache_Exception, Manifest_Validation_Exception
from groupmatch.reid_datasets.descriptor_cache import CACHE_MAGIC, cache_bytes, read_descriptor_cache, write_descriptor_cache
from groupmatch.reid_datasets.group_graph_documents import graph_from_dict, graph_to_dict, read_graph_documents, write_graph_documents


def _graphs() -> list[Group_Graph]:
    rng = np.random.default_rng(9)
    graphs = []
    for g, size in enumerate((3, 1, 4)):
        nodes = [Group_Node(f"person-{g}-{i}", (float(x), float(y)), Person_Descriptor(rng.dirichlet(np.ones(8), size=2).ravel(), 8))
                 for i, (x, y) in enumerate(rng.uniform(0.0, 300.0, size=(size, 2)))]
        global_descriptor = Person_Descriptor(rng.dirichlet(np.ones(8), size=2).ravel(), 8) if g == 0 else None
        graphs.append(Group_Graph(f"group-{g}", "A" if g % 2 == 0 else "B", nodes, (320.0, 300.0), global_descriptor=global_descriptor))
    return graphs


def _assert_same(before: Group_Graph, after: Group_Graph):
    assert before.group_id == after.group_id and before.camera == after.camera
    assert before.image_size == after.image_size
    assert before.person_ids == after.person_ids
    assert np.array_equal(before.descriptor_matrix, after.descriptor_matrix)
    assert np.array_equal(before.centers, after.centers)
    assert np.array_equal(before.reference_direction, after.reference_direction)
    assert (before.global_descriptor is None) == (after.global_descriptor is None)
    if before.global_descriptor is not None:
        assert np.array_equal(before.global_descriptor.values, after.global_descriptor.values)
    for pair, edge in before.edges.items():
        assert np.array_equal(edge.polar_angle_hist, after.edges[pair].polar_angle_hist)


class Test_Descriptor_Cache(TestCase):

    def test_round_trip(self):
        graphs = _graphs()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "groups.gmdc")
            write_descriptor_cache(graphs, path)
            loaded = read_descriptor_cache(path)
        assert len(loaded) == 3
        for before, after in zip(graphs, loaded):
            _assert_same(before, after)
        assert cache_bytes(loaded) == cache_bytes(graphs)

    def test_header(self):
        data = cache_bytes(_graphs())
        assert data[:4] == CACHE_MAGIC
        assert data[4:6] == (1).to_bytes(2, "little")
        assert data[6:10] == (3).to_bytes(4, "little")
        assert cache_bytes([]) == CACHE_MAGIC + b"\x01\x00" + b"\x00\x00\x00\x00"

    def test_bad_magic(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "groups.gmdc")
            with open(path, "wb") as out:
                out.write(b"NOPE" + cache_bytes(_graphs())[4:])
            with self.assertRaises(Descriptor_Cache_Exception):
                read_descriptor_cache(path)

    def test_bad_version(self):
        data = bytearray(cache_bytes(_graphs()))
        data[4] = 7
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "groups.gmdc")
            with open(path, "wb") as out:
                out.write(bytes(data))
            with self.assertRaises(Descriptor_Cache_Exception) as context:
                read_descriptor_cache(path)
        assert "version" in str(context.exception)

    def test_truncated(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "groups.gmdc")
            with open(path, "wb") as out:
                out.write(cache_bytes(_graphs())[:-10])
            with self.assertRaises(Descriptor_Cache_Exception) as context:
                read_descriptor_cache(path)
        assert "truncated" in str(context.exception)


class Test_Group_Graph_Documents(TestCase):

    def test_round_trip(self):
        graphs = _graphs()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "groups.json")
            write_graph_documents(graphs, path)
            loaded = read_graph_documents(path)
            with open(path, encoding="utf-8") as first:
                written = first.read()
            write_graph_documents(loaded, path)
            with open(path, encoding="utf-8") as second:
                assert second.read() == written
        for before, after in zip(graphs, loaded):
            _assert_same(before, after)

    def test_document(self):
        document = graph_to_dict(_graphs()[1])
        assert document["schema"] == "groupmatch.group_graph"
        assert len(document["nodes"]) == 1
        assert "globalDescriptor" not in document
        json.dumps(document)

    def test_wrong_schema(self):
        document = graph_to_dict(_graphs()[0])
        document["schema"] = "other"
        with self.assertRaises(Manifest_Validation_Exception) as context:
            graph_from_dict(document, pointer="/3")
        assert context.exception.pointer == "/3/schema"

    def test_malformed(self):
        document = graph_to_dict(_graphs()[0])
        del document["nodes"][0]["center"]
        with self.assertRaises(Manifest_Validation_Exception):
            graph_from_dict(document)
