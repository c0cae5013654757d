"""Module containing the Matching_Set class: the cross-camera counterparts of one person."""
from dataclasses import dataclass

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph


@dataclass(frozen=True)
class Matching_Set:
    """
    The descriptors matched to one person across every reference group of the opposite camera.
    At most one member comes from each reference group.
    """
    camera: str
    group_id: str
    node: int
    owner_descriptor: np.ndarray
    members: np.ndarray
    member_groups: tuple[str, ...] = ()

    def __post_init__(self):
        assert self.members.ndim == 2, f"Members of {self.owner} must be a (m, D) matrix, got shape {self.members.shape}"
        assert len(self.member_groups) in (0, len(self.members)), f"Member group labels of {self.owner} do not align with its members"
        assert len(set(self.member_groups)) == len(self.member_groups), f"{self.owner} has two members from one reference group"

    @property
    def owner(self) -> tuple[str, str, int]:
        """
        :return: (camera, group id, node index) of the person this set belongs to.
        """
        return self.camera, self.group_id, self.node

    @property
    def is_empty(self) -> bool:
        """
        :return: True if no reference group matched this person.
        """
        return len(self.members) == 0

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self):
        return f"M({self.camera}/{self.group_id}/{self.node}) with {len(self)} members"

    def __repr__(self):
        return str(self)


def build_matching_sets(group: Group_Graph, counterparts: list[tuple[Group_Graph, list[tuple[int, int]]]]) -> list[Matching_Set]:
    """
    Collect the matching set of every person in a group from the current one-to-one matches.
    :param group: The group whose people own the sets.
    :param counterparts: For every reference group of the opposite camera, the group and its matches as
        (index in `group`, index in the reference group) pairs.
    :return: One matching set per node of `group`, in node order.
    """
    dimension = group.descriptor_matrix.shape[1] if len(group) > 0 else 0
    collected: list[list[np.ndarray]] = [[] for _ in range(len(group))]
    sources: list[list[str]] = [[] for _ in range(len(group))]
    for reference, matches in counterparts:
        for own_index, reference_index in matches:
            collected[own_index].append(reference.nodes[reference_index].descriptor.values)
            sources[own_index].append(reference.group_id)
    sets = []
    for node_index, node in enumerate(group.nodes):
        members = np.array(collected[node_index], dtype=np.float64).reshape(-1, dimension)
        sets.append(Matching_Set(group.camera, group.group_id, node_index, node.descriptor.values, members,
                                 tuple(sources[node_index])))
    return sets
