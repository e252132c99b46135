"""Core array operations: row softmax, Otsu thresholding, lattice snapping."""

import numpy as np

from ..errors import ConstantInput, ShapeError

GRID_BITS = 12  # latents live on a 2**-12 lattice so layer algebra is exact


def softmax_rows(m: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Row-wise softmax of a 2-D matrix of finite logits."""
    if m.ndim != 2:
        raise ShapeError(f"expected 2-D input, got shape {m.shape}")
    if temperature <= 0:
        raise ShapeError("temperature must be positive")
    z = np.asarray(m, dtype=np.float32) / np.float32(temperature)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def quantize_256(values: np.ndarray) -> np.ndarray:
    """Map [0,1] values to bin indices 0..255 with equal-width bins."""
    v = np.asarray(values)
    return np.minimum((v * 256.0).astype(np.int64), 255).clip(0, 255)


def histogram_256(values: np.ndarray) -> np.ndarray:
    """256-bin histogram of [0,1] values."""
    return np.bincount(quantize_256(values).ravel(), minlength=256)[:256]


def otsu_threshold(h: np.ndarray) -> int:
    """Bin index t splitting h into {bins < t} and {bins >= t} with maximum
    between-class variance. Ties break toward the lowest index.

    Raises ConstantInput when fewer than two bins hold mass.
    """
    c = np.asarray(h, dtype=np.float64)
    if c.shape != (256,):
        raise ShapeError(f"histogram must have 256 bins, got {c.shape}")
    if np.any(c < 0):
        raise ShapeError("histogram counts must be nonnegative")
    if np.count_nonzero(c) < 2:
        raise ConstantInput("all histogram mass in one bin")
    total = c.sum()
    bins = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(c)[:-1]           # mass of {bins < t} for t = 1..255
    m0 = np.cumsum(c * bins)[:-1]    # first moment of the low class
    w1 = total - w0
    m_total = (c * bins).sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0 / w0
        mu1 = (m_total - m0) / w1
        var_between = w0 * w1 * (mu0 - mu1) ** 2
    var_between[(w0 == 0) | (w1 == 0)] = -np.inf
    return int(np.argmax(var_between)) + 1


def snap_to_grid(x: np.ndarray, bits: int = GRID_BITS) -> np.ndarray:
    """Round to the nearest multiple of 2**-bits.

    Grid values with magnitude below 2**(23-bits) are exactly representable
    in float32, so sums and differences of snapped tensors are exact. All
    latents are snapped at encode time and after sampling, which makes layer
    arithmetic (subtract a background, add it back) bit-reversible.
    """
    scale = np.float32(2.0**bits)
    return (np.round(np.asarray(x, dtype=np.float32) * scale) / scale).astype(np.float32)
