"""JSON documents of group graphs. Only the people are stored; edges and hyper-edges are rebuilt on load."""
import json

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node
from groupmatch.group_features.Person_Descriptor import Person_Descriptor
from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config
from groupmatch.groupmatch_exceptions import Manifest_Validation_Exception

GRAPH_SCHEMA = "groupmatch.group_graph"
GRAPH_VERSION = 1


def graph_to_dict(graph: Group_Graph) -> dict:
    """
    :param graph: The group graph to serialize.
    :return: JSON-ready document of the graph.
    """
    document = {"schema": GRAPH_SCHEMA, "version": GRAPH_VERSION,
                "groupId": graph.group_id, "camera": graph.camera,
                "imageSize": [graph.image_size[0], graph.image_size[1]],
                "referenceDirection": [float(v) for v in graph.reference_direction],
                "nodes": [{"personId": n.person_id, "center": [float(n.center[0]), float(n.center[1])],
                           "bins": n.descriptor.bins, "descriptor": [float(v) for v in n.descriptor.values]}
                          for n in graph.nodes]}
    if graph.global_descriptor is not None:
        document["globalDescriptor"] = [float(v) for v in graph.global_descriptor.values]
    return document


def graph_from_dict(document: dict, config: Feature_Config | None = None, pointer: str = "") -> Group_Graph:
    """
    :param document: A document written by graph_to_dict.
    :param config: Feature configuration of the rebuilt graph.
    :param pointer: JSON pointer of the document, used in error messages.
    :return: The rebuilt group graph.
    :raises Manifest_Validation_Exception: If the document does not describe a group graph.
    """
    if not isinstance(document, dict) or document.get("schema") != GRAPH_SCHEMA:
        raise Manifest_Validation_Exception(f"{pointer}/schema", f"expected \"{GRAPH_SCHEMA}\"")
    if document.get("version") != GRAPH_VERSION:
        raise Manifest_Validation_Exception(f"{pointer}/version", f"unsupported version {document.get('version')}")
    try:
        nodes = [Group_Node(str(n["personId"]), (float(n["center"][0]), float(n["center"][1])),
                            Person_Descriptor(np.array(n["descriptor"], dtype=np.float64), int(n.get("bins", 16))))
                 for n in document["nodes"]]
        bins = nodes[0].descriptor.bins if len(nodes) > 0 else 16
        global_descriptor = None
        if "globalDescriptor" in document:
            global_descriptor = Person_Descriptor(np.array(document["globalDescriptor"], dtype=np.float64), bins)
        return Group_Graph(str(document["groupId"]), str(document["camera"]), nodes,
                           (float(document["imageSize"][0]), float(document["imageSize"][1])),
                           np.array(document["referenceDirection"], dtype=np.float64), config,
                           global_descriptor=global_descriptor)
    except (KeyError, IndexError, TypeError, ValueError) as error:
        raise Manifest_Validation_Exception(pointer or "/", f"malformed group graph document: {error}") from error


def write_graph_documents(graphs: list[Group_Graph], path: str):
    """
    Write the graphs as one JSON list with sorted keys so identical graphs give identical bytes.
    :param graphs: Group graphs to write.
    :param path: Output path.
    """
    with open(path, "w", encoding="utf-8") as out:
        json.dump([graph_to_dict(g) for g in graphs], out, indent=1, sort_keys=True)
        out.write("\n")


def read_graph_documents(path: str, config: Feature_Config | None = None) -> list[Group_Graph]:
    """
    :param path: A file written by write_graph_documents.
    :param config: Feature configuration of the rebuilt graphs.
    :return: The group graphs in file order.
    """
    with open(path, encoding="utf-8") as source:
        documents = json.load(source)
    if not isinstance(documents, list):
        raise Manifest_Validation_Exception("", "expected a list of group graph documents")
    return [graph_from_dict(d, config, f"/{index}") for index, d in enumerate(documents)]
