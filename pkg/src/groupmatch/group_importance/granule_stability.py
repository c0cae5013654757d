"""Geometric stability of person pairs and triples."""
import math

import numpy as np

from groupmatch.group_features.Group_Graph import Group_Graph

_Max_Exponent = 700.0
_Sine_60 = math.sin(math.pi / 3.0)


def omega2(gi: Group_Graph, i: int, j: int, sigma_r: float = 0.5) -> float:
    """
    :param gi: The group graph.
    :param i: First person.
    :param j: Second person.
    :param sigma_r: Scale of the pair stability.
    :return: exp(sigma_r * diagonal / distance); shorter pairs are more stable. Distances are floored at one pixel.
    """
    delta = gi.centers[j] - gi.centers[i]
    distance = max(float(np.hypot(delta[0], delta[1])), 1.0)
    return math.exp(min(sigma_r * gi.diagonal / distance, _Max_Exponent))


def omega3(gi: Group_Graph, i: int, j: int, k: int, sigma_s: float = 0.5) -> float:
    """
    :param gi: The group graph.
    :param i: First person.
    :param j: Second person.
    :param k: Third person.
    :param sigma_s: Scale of the triangle stability.
    :return: exp(-(1 / sigma_s) * sum |sin(angle) - sin(60)|); 1 exactly for an equilateral triangle.
    """
    hyper_edge = gi.hyper_edges[tuple(sorted((i, j, k)))]
    return triangle_stability(hyper_edge.internal_angle_sines, sigma_s)


def triangle_stability(internal_angle_sines: np.ndarray, sigma_s: float = 0.5) -> float:
    """
    :param internal_angle_sines: Sines of the three internal angles.
    :param sigma_s: Scale of the triangle stability.
    :return: The stability of a triangle with those angles.
    """
    return math.exp(-float(np.abs(np.asarray(internal_angle_sines) - _Sine_60).sum()) / sigma_s)
