"""Robust estimate of the direction along which a group is laid out."""
import logging
import math

import numpy as np
from skimage.measure import LineModelND, ransac

logger = logging.getLogger(__name__)


def canonical_direction(direction: np.ndarray) -> np.ndarray:
    """
    :param direction: A non-zero 2-vector.
    :return: The unit vector along the direction, signed so its first non-zero component is positive.
    """
    unit = np.asarray(direction, dtype=np.float64) / float(np.linalg.norm(direction))
    if unit[0] < 0 or (unit[0] == 0 and unit[1] < 0):
        unit = -unit
    return unit


def fit_reference_direction(centers: list[tuple[float, float]], image_size: tuple[float, float] | None = None,
                            trials: int = 500, threshold: float = 0.025, seed: int = 0) -> np.ndarray:
    """
    Fit a line through the person centres with RANSAC.
    :param centers: At least one centre point in pixel coordinates.
    :param image_size: (width, height) of the group image; the inlier threshold is a fraction of its diagonal.
        Defaults to the bounding box of the centres.
    :param trials: RANSAC iterations.
    :param threshold: Inlier distance as a fraction of the image diagonal.
    :param seed: Seed of the RANSAC sampler.
    :return: Unit 2-vector along the fitted line. (1, 0) for a single point, the two-point direction for two points.
    """
    assert len(centers) >= 1, "A reference direction needs at least one centre"
    points = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    # lexicographic order makes the fit independent of the order of the people
    points = points[np.lexsort((points[:, 1], points[:, 0]))]
    fallback = np.array([1.0, 0.0])
    if len(points) == 1:
        return fallback
    if len(points) == 2:
        delta = points[1] - points[0]
        if float(np.linalg.norm(delta)) == 0.0:
            return fallback
        return canonical_direction(delta)
    if image_size is None:
        extent = points.max(axis=0) - points.min(axis=0)
        diagonal = float(np.hypot(extent[0], extent[1]))
    else:
        diagonal = math.hypot(float(image_size[0]), float(image_size[1]))
    if diagonal == 0.0:
        return fallback
    model, inliers = ransac(points, LineModelND, min_samples=2, residual_threshold=threshold * diagonal,
                            max_trials=trials, rng=seed)
    if model is None or inliers is None:
        logger.debug(f"RANSAC found no line through {len(points)} centres; using the horizontal direction")
        return fallback
    _origin, direction = model.params
    if float(np.linalg.norm(direction)) == 0.0:
        return fallback
    return canonical_direction(direction)
