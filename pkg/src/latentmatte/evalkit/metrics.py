"""Video quality metrics: PSNR, windowed SSIM, temporal consistency."""

import numpy as np

from ..errors import EmptyMask, ShapeError

INFINITE = float("inf")

_C1 = 0.01 ** 2
_C2 = 0.03 ** 2


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10*log10(1/MSE) with peak 1.0; identical inputs give the Infinite
    sentinel rather than a capped value."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return INFINITE
    return 10.0 * np.log10(1.0 / mse)


def psnr_masked(a: np.ndarray, b: np.ndarray, mask: np.ndarray) -> float:
    """PSNR restricted to pixels where mask is true; channels follow their
    pixel. Raises EmptyMask when nothing is selected."""
    a, b = _check_pair(a, b)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != a.shape[:3]:
        raise ShapeError(f"mask {mask.shape} does not align with video {a.shape}")
    if not mask.any():
        raise EmptyMask("mask selects no pixels")
    diff = (a - b)[mask]
    mse = float(np.mean(diff ** 2))
    if mse == 0.0:
        return INFINITE
    return 10.0 * np.log10(1.0 / mse)


def ssim(a: np.ndarray, b: np.ndarray, window: int = 8) -> float:
    """Mean SSIM over non-overlapping window x window tiles, channels, and
    frames, with the standard constants c1=(0.01)^2, c2=(0.03)^2. Population
    moments per tile; trailing rows/columns that do not fill a tile are
    dropped. Identical inputs score exactly 1.0."""
    a, b = _check_pair(a, b)
    if a.ndim != 4:
        raise ShapeError(f"expected (F,H,W,C) video, got {a.shape}")
    F, H, W, C = a.shape
    if window < 2 or window > min(H, W):
        raise ShapeError(f"window {window} does not fit {H}x{W} frames")
    th, tw = H // window, W // window

    def tiles(x):
        x = x[:, : th * window, : tw * window, :]
        x = x.reshape(F, th, window, tw, window, C)
        return x.transpose(0, 1, 3, 5, 2, 4).reshape(F, th, tw, C, window * window)

    ta, tb = tiles(a), tiles(b)
    mu_a = ta.mean(axis=-1)
    mu_b = tb.mean(axis=-1)
    var_a = ta.var(axis=-1)
    var_b = tb.var(axis=-1)
    cov = (ta * tb).mean(axis=-1) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + _C1) * (2.0 * cov + _C2)
    den = (mu_a ** 2 + mu_b ** 2 + _C1) * (var_a + var_b + _C2)
    return float(np.mean(num / den))


def temporal_consistency(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute difference between the consecutive-frame deltas of a
    and those of b; 0 exactly for identical videos."""
    a, b = _check_pair(a, b)
    if a.shape[0] < 2:
        raise ShapeError("need at least 2 frames for temporal deltas")
    da = a[1:] - a[:-1]
    db = b[1:] - b[:-1]
    return float(np.mean(np.abs(da - db)))
