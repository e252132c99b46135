"""Numpy building blocks for the inference-side forward passes."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import erf


def conv2d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1, pad: int = 1) -> np.ndarray:
    """x: (B,C,H,W), w: (O,C,kh,kw) -> (B,O,Ho,Wo). im2col + one GEMM."""
    kh, kw = w.shape[2], w.shape[3]
    if pad:
        x = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    B, C, Ho, Wo = win.shape[:4]
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(B * Ho * Wo, C * kh * kw)
    out = cols @ w.reshape(w.shape[0], -1).T + b
    return out.reshape(B, Ho, Wo, w.shape[0]).transpose(0, 3, 1, 2)


def upsample2x(x: np.ndarray) -> np.ndarray:
    """Nearest-neighbor 2x upsample of (B,C,H,W)."""
    return x.repeat(2, axis=2).repeat(2, axis=3)


def silu(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.exp(-x))


def gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x / np.float32(np.sqrt(2.0))))


def layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mu) / np.sqrt(var + eps) * g + b


def time_embedding(t: int, dim: int) -> np.ndarray:
    """Sinusoidal embedding of a step index."""
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half, dtype=np.float64) / half)
    ang = float(t) * freqs
    return np.concatenate([np.sin(ang), np.cos(ang)]).astype(np.float32)
