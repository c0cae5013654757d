"""Module containing the ReId_Task class: probe and gallery groups with their labels."""
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph
from groupmatch.groupmatch_exceptions import GroupMatch_Validation_Exception


@dataclass(frozen=True)
class ReId_Task:
    """
    Probe groups from camera A, gallery groups from camera B, the true gallery of each labelled probe and the
    person correspondences of every labelled pair.
    """
    probes: tuple[Group_Graph, ...]
    galleries: tuple[Group_Graph, ...]
    ground_truth: dict[str, str] = field(default_factory=dict)
    correspondences: dict[tuple[str, str], tuple[tuple[str, str], ...]] = field(default_factory=dict)

    def __post_init__(self):
        probe_ids = [g.group_id for g in self.probes]
        gallery_ids = [g.group_id for g in self.galleries]
        if len(set(probe_ids)) != len(probe_ids):
            raise GroupMatch_Validation_Exception(f"probe group ids are not unique: {probe_ids}")
        if len(set(gallery_ids)) != len(gallery_ids):
            raise GroupMatch_Validation_Exception(f"gallery group ids are not unique: {gallery_ids}")
        if set(probe_ids) & set(gallery_ids):
            raise GroupMatch_Validation_Exception(f"group ids used on both cameras: {sorted(set(probe_ids) & set(gallery_ids))}")
        probes, galleries = self.probe_map, self.gallery_map
        for probe_id, gallery_id in self.ground_truth.items():
            if probe_id not in probes or gallery_id not in galleries:
                raise GroupMatch_Validation_Exception(f"ground truth {probe_id}->{gallery_id} references a missing group")
        for (probe_id, gallery_id), pairs in self.correspondences.items():
            if probe_id not in probes or gallery_id not in galleries:
                raise GroupMatch_Validation_Exception(f"correspondences of {probe_id}->{gallery_id} reference a missing group")
            probe_people, gallery_people = set(probes[probe_id].person_ids), set(galleries[gallery_id].person_ids)
            for p, q in pairs:
                if p not in probe_people or q not in gallery_people:
                    raise GroupMatch_Validation_Exception(f"correspondence {p}->{q} of {probe_id}->{gallery_id} references a missing person")

    @property
    def probe_map(self) -> dict[str, Group_Graph]:
        """
        :return: Probe groups keyed by group id.
        """
        return {g.group_id: g for g in self.probes}

    @property
    def gallery_map(self) -> dict[str, Group_Graph]:
        """
        :return: Gallery groups keyed by group id.
        """
        return {g.group_id: g for g in self.galleries}

    @property
    def labelled_pairs(self) -> list[tuple[str, str]]:
        """
        :return: (probe id, gallery id) of every labelled pair in probe order.
        """
        return [(g.group_id, self.ground_truth[g.group_id]) for g in self.probes if g.group_id in self.ground_truth]

    @property
    def distractors(self) -> list[str]:
        """
        :return: Ids of gallery groups that are no probe's true match.
        """
        truths = set(self.ground_truth.values())
        return [g.group_id for g in self.galleries if g.group_id not in truths]

    def pairs(self) -> list[tuple[Group_Graph, Group_Graph]]:
        """
        :return: Every (probe, gallery) combination in probe-major order.
        """
        return [(p, q) for p in self.probes for q in self.galleries]

    def restricted_to(self, probe_ids: list[str]):
        """
        :param probe_ids: Probes to keep.
        :return: A task with the given probes, their true galleries and every distractor gallery.
        """
        keep = set(probe_ids)
        probes = tuple(g for g in self.probes if g.group_id in keep)
        truths = {self.ground_truth[p] for p in keep if p in self.ground_truth}
        distractors = set(self.distractors)
        galleries = tuple(g for g in self.galleries if g.group_id in truths or g.group_id in distractors)
        return ReId_Task(probes, galleries, {p: g for p, g in self.ground_truth.items() if p in keep},
                         {k: v for k, v in self.correspondences.items() if k[0] in keep and k[1] in truths})

    def limited(self, limit: int):
        """
        :param limit: Maximum number of probes.
        :return: The task restricted to its first `limit` probes.
        """
        return self.restricted_to([g.group_id for g in self.probes[:limit]])

    def split(self, fraction: float, rng: np.random.Generator):
        """
        :param fraction: Share of the labelled pairs kept for testing.
        :param rng: Random generator that draws the pairs.
        :return: The test task: the drawn pairs plus every distractor gallery.
        """
        labelled = [p for p, _ in self.labelled_pairs]
        count = min(max(int(round(fraction * len(labelled))), 1), len(labelled)) if len(labelled) > 0 else 0
        chosen = sorted(rng.choice(len(labelled), size=count, replace=False).tolist()) if count > 0 else []
        return self.restricted_to([labelled[c] for c in chosen])

    def with_global_graphs(self):
        """
        :return: A task in which every group is a single node summarizing the whole group.
        """
        return dataclasses.replace(self, probes=tuple(g.global_graph() for g in self.probes),
                                   galleries=tuple(g.global_graph() for g in self.galleries), correspondences={})

    def __str__(self):
        return f"Task with {len(self.probes)} probes, {len(self.galleries)} galleries, {len(self.ground_truth)} labelled"

    def __repr__(self):
        return str(self)
