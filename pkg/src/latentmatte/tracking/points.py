"""Sampling of query points from the object mask."""

import math

import numpy as np

from ..errors import ConfigError, EmptyMask
from ..numerics import SeededRng


def sample_object_points(mask: np.ndarray, density: float, rng: SeededRng):
    """Sample ceil(density * pixels) masked pixels per frame, without replacement.

    Returns a list of (frame, x, y) int tuples, ordered by frame then by the
    mask's row-major pixel order. Deterministic for a given rng state.
    """
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"density must be in (0, 1], got {density}")
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise ConfigError("mask must be (frames, height, width)")
    if not mask.any():
        raise EmptyMask("cannot sample points from an empty mask")
    points: list[tuple[int, int, int]] = []
    for frame in range(mask.shape[0]):
        ys, xs = np.nonzero(mask[frame])
        if ys.size == 0:
            continue
        k = math.ceil(density * ys.size)
        chosen = rng.choice_without_replacement(int(ys.size), k)
        for i in chosen:
            points.append((frame, int(xs[i]), int(ys[i])))
    return points
