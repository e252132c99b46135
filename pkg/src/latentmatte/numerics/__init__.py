"""Deterministic numeric foundations: tensor I/O, RNG, schedules, softmax, Otsu."""

from .ops import histogram_256, otsu_threshold, quantize_256, snap_to_grid, softmax_rows
from .rng import SeededRng
from .schedule import NoiseSchedule, add_noise
from .tensorio import load_tensor, save_tensor

__all__ = [
    "NoiseSchedule",
    "SeededRng",
    "add_noise",
    "histogram_256",
    "load_tensor",
    "otsu_threshold",
    "quantize_256",
    "save_tensor",
    "snap_to_grid",
    "softmax_rows",
]
