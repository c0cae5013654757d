"""Tests of group graphs, their edge and hyper-edge attributes and the fitted reference direction."""
import math
from unittest import TestCase

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from groupmatch.group_features.Group_Graph import Group_Graph, Group_Node, edge_attribute, gaussian_window, hyper_edge_attribute
from groupmatch.group_features.Person_Descriptor import Person_Descriptor
from groupmatch.group_features.reference_direction import fit_reference_direction


def _graph(centers, image_size=(100.0, 100.0), reference=None) -> Group_Graph:
    nodes = [Group_Node(f"p{i}", (float(c[0]), float(c[1])), Person_Descriptor(np.full(16, 1.0 / 16.0), 16))
             for i, c in enumerate(centers)]
    return Group_Graph("g", "A", nodes, image_size, reference)


_coordinate = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)


class Test_Reference_Direction(TestCase):

    def test_collinear_along_x(self):
        direction = fit_reference_direction([(0.0, 5.0), (10.0, 5.0), (20.0, 5.0), (35.0, 5.0)], (100.0, 100.0))
        assert np.allclose(direction, [1.0, 0.0]), f"{direction}"

    def test_single_point(self):
        assert np.array_equal(fit_reference_direction([(3.0, 4.0)]), [1.0, 0.0])

    def test_two_points(self):
        direction = fit_reference_direction([(0.0, 5.0), (0.0, 0.0)])
        assert np.allclose(direction, [0.0, 1.0]), f"{direction}"

    def test_outlier_is_ignored(self):
        centers = [(0.0, 0.0), (10.0, 10.0), (20.0, 20.0), (30.0, 30.0), (40.0, 40.0), (40.0, 0.0)]
        direction = fit_reference_direction(centers, (100.0, 100.0))
        angle = math.degrees(math.atan2(direction[1], direction[0]))
        print(f"Fitted direction {direction} at {angle:.3f} degrees")
        assert abs(angle - 45.0) <= 2.0
        assert math.isclose(float(np.linalg.norm(direction)), 1.0)

    def test_order_of_people_does_not_matter(self):
        centers = [(5.0, 40.0), (22.0, 47.0), (41.0, 50.0), (63.0, 61.0), (80.0, 62.0)]
        forward = fit_reference_direction(centers, (100.0, 100.0))
        backward = fit_reference_direction(list(reversed(centers)), (100.0, 100.0))
        assert np.array_equal(forward, backward)


class Test_Edge_Attribute(TestCase):

    def test_window_is_circular(self):
        window = gaussian_window(0, 9, 5.0, circular=True)
        assert window[1] == window[8]
        assert math.isclose(float(window.sum()), 1.0)
        linear = gaussian_window(0, 9, 5.0)
        assert int(np.argmax(linear)) == 0 and linear[1] > linear[8]

    def test_distance_bin(self):
        graph = _graph([(0.0, 0.0), (10.0, 0.0)])
        edge = graph.directed_edge(0, 1)
        diagonal = math.hypot(100.0, 100.0)
        floor = graph.feature_config.rho_floor
        expected = int(math.floor((math.log(10.0 / diagonal) - math.log(floor)) / -math.log(floor) * 9))
        assert expected == 5
        assert int(np.argmax(edge.log_distance_hist)) == expected
        assert math.isclose(float(edge.log_distance_hist.sum()), 1.0)
        assert math.isclose(float(edge.polar_angle_hist.sum()), 1.0)

    def test_angle_bin_zero_is_symmetric(self):
        graph = _graph([(0.0, 0.0), (10.0, 0.0)])
        edge = graph.directed_edge(0, 1)
        assert edge.polar_angle == 0.0
        assert edge.polar_angle_hist[1] == edge.polar_angle_hist[8]

    def test_coincident_centers(self):
        graph = _graph([(10.0, 10.0), (10.0, 10.0)])
        edge = graph.directed_edge(0, 1)
        assert int(np.argmax(edge.log_distance_hist)) == 0

    def test_swapped_endpoints(self):
        graph = _graph([(12.0, 30.0), (47.0, 71.0), (80.0, 20.0)])
        for i, j in ((0, 1), (0, 2), (1, 2)):
            forward, backward = graph.directed_edge(i, j), graph.directed_edge(j, i)
            assert np.array_equal(forward.log_distance_hist, backward.log_distance_hist)
            turned = (forward.polar_angle + math.pi) % (2.0 * math.pi)
            difference = abs(turned - backward.polar_angle)
            assert min(difference, 2.0 * math.pi - difference) < 1e-9, f"{i}->{j}: {forward.polar_angle} vs {backward.polar_angle}"

    def test_scale_invariance(self):
        centers = [(12.0, 30.0), (47.0, 71.0), (80.0, 20.0), (33.0, 52.0)]
        small = _graph(centers, (100.0, 100.0))
        large = _graph([(3.0 * x + 7.0, 3.0 * y + 7.0) for x, y in centers], (300.0, 300.0))
        for pair, edge in small.edges.items():
            assert np.allclose(edge.log_distance_hist, large.edges[pair].log_distance_hist), f"{pair}"

    def test_rotation_invariance(self):
        centers = np.array([(12.0, 30.0), (47.0, 71.0), (80.0, 20.0), (33.0, 52.0)])
        reference = np.array([1.0, 0.0])
        phi = 0.3
        rotation = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        original = _graph(centers, (200.0, 200.0), reference)
        turned = _graph(centers @ rotation.T + 50.0, (200.0, 200.0), rotation @ reference)
        for pair, edge in original.edges.items():
            assert np.allclose(edge.polar_angle_hist, turned.edges[pair].polar_angle_hist), f"{pair}"

    def test_composite_length(self):
        graph = _graph([(0.0, 0.0), (10.0, 0.0), (5.0, 8.0)])
        assert len(graph.edges[(0, 1)].composite(graph)) == 16 + 16 + 9 + 9
        assert len(graph.hyper_edges[(0, 1, 2)].composite(graph)) == 3 * 16 + 3 * 18 + 3


class Test_Hyper_Edge_Attribute(TestCase):

    def test_equilateral(self):
        graph = _graph([(0.0, 0.0), (20.0, 0.0), (10.0, 10.0 * math.sqrt(3.0))])
        hyper = hyper_edge_attribute(graph, 0, 1, 2)
        assert np.allclose(hyper.internal_angle_sines, math.sin(math.pi / 3.0))
        assert not hyper.degenerate

    def test_right_isosceles(self):
        graph = _graph([(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)])
        hyper = hyper_edge_attribute(graph, 0, 1, 2)
        assert np.allclose(hyper.internal_angle_sines, [1.0, math.sqrt(2.0) / 2.0, math.sqrt(2.0) / 2.0])
        reordered = graph.ordered_hyper_edge(1, 2, 0)
        assert np.allclose(reordered.internal_angle_sines, [math.sqrt(2.0) / 2.0, math.sqrt(2.0) / 2.0, 1.0])

    def test_collinear(self):
        graph = _graph([(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)])
        hyper = graph.hyper_edges[(0, 1, 2)]
        assert hyper.degenerate
        assert np.array_equal(hyper.internal_angle_sines, np.zeros(3))
        assert hyper.internal_angles == (0.0, math.pi, 0.0)

    @given(st.lists(st.tuples(_coordinate, _coordinate), min_size=3, max_size=3))
    @settings(max_examples=200, deadline=None)
    def test_angles_sum_to_pi(self, points):
        graph = _graph(points)
        hyper = hyper_edge_attribute(graph, 0, 1, 2)
        assume(not hyper.degenerate)
        assert abs(sum(hyper.internal_angles) - math.pi) < 1e-6
        assert np.all(hyper.internal_angle_sines >= 0.0) and np.all(hyper.internal_angle_sines <= 1.0)


class Test_Group_Graph(TestCase):

    def test_attribute_maps_are_total(self):
        graph = _graph([(10.0, 10.0), (20.0, 15.0), (30.0, 12.0), (45.0, 20.0)])
        assert len(graph.edges) == 6
        assert len(graph.hyper_edges) == 4
        assert math.isclose(float(np.linalg.norm(graph.reference_direction)), 1.0)

    def test_small_groups(self):
        single = _graph([(10.0, 10.0)])
        assert len(single.edges) == 0 and len(single.hyper_edges) == 0
        assert np.array_equal(single.reference_direction, [1.0, 0.0])
        pair = _graph([(10.0, 10.0), (30.0, 10.0)])
        assert len(pair.edges) == 1 and len(pair.hyper_edges) == 0

    def test_edge_attribute_function_matches_graph(self):
        graph = _graph([(10.0, 10.0), (20.0, 40.0)])
        direct = edge_attribute(graph, 1, 0, graph.feature_config)
        assert np.array_equal(direct.polar_angle_hist, graph.directed_edge(1, 0).polar_angle_hist)

    def test_global_graph(self):
        nodes = [Group_Node("a", (10.0, 10.0), Person_Descriptor(np.array([1.0, 0.0]), 2)),
                 Group_Node("b", (30.0, 20.0), Person_Descriptor(np.array([0.0, 1.0]), 2))]
        graph = Group_Graph("g", "A", nodes, (100.0, 100.0))
        summary = graph.global_graph()
        assert len(summary) == 1
        assert summary.group_id == "g"
        assert np.allclose(summary.nodes[0].descriptor.values, [0.5, 0.5])
        assert summary.nodes[0].center == (20.0, 15.0)
        print(summary)
