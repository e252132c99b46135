"""VAE-lite forward passes (numpy): 2x temporal, 4x spatial, 8 latent channels.

Frames are consumed in pairs (channel-stacked RGB of two consecutive frames),
so each latent frame depends only on its own pixel-frame pair. Latents are
normalized per channel with stats recorded at training time and snapped to a
2**-12 lattice, which makes downstream layer arithmetic exact.
"""

import numpy as np

from ..errors import NoCheckpoint, ShapeError
from ..numerics import snap_to_grid
from .config import ModelConfig
from .layers import conv2d, silu, upsample2x

VAE_WEIGHT_NAMES = (
    "vae.enc.conv1.w", "vae.enc.conv1.b",
    "vae.enc.conv2.w", "vae.enc.conv2.b",
    "vae.enc.conv3.w", "vae.enc.conv3.b",
    "vae.dec.conv1.w", "vae.dec.conv1.b",
    "vae.dec.conv2.w", "vae.dec.conv2.b",
    "vae.dec.conv3.w", "vae.dec.conv3.b",
    "vae.dec.conv4.w", "vae.dec.conv4.b",
    "vae.latent_mean", "vae.latent_std",
)


def check_vae_weights(weights: dict) -> None:
    missing = [n for n in VAE_WEIGHT_NAMES if n not in weights]
    if missing:
        raise NoCheckpoint(f"VAE weights missing: {missing[:3]}...")


def _pair_frames(v: np.ndarray) -> np.ndarray:
    """(F,H,W,3) -> (F/2, 6, H, W), channels [RGB of frame 2i, RGB of 2i+1]."""
    F, H, W, _ = v.shape
    pairs = v.reshape(F // 2, 2, H, W, 3)
    return pairs.transpose(0, 1, 4, 2, 3).reshape(F // 2, 6, H, W)


def _unpair_frames(x: np.ndarray) -> np.ndarray:
    """(f, 6, H, W) -> (2f, H, W, 3)."""
    f, _, H, W = x.shape
    return x.reshape(f, 2, 3, H, W).transpose(0, 1, 3, 4, 2).reshape(2 * f, H, W, 3)


def encode_raw(weights: dict, config: ModelConfig, v: np.ndarray) -> np.ndarray:
    """Encoder forward without normalization; returns (f, h, w, c)."""
    check_vae_weights(weights)
    if v.ndim != 4 or v.shape[3] != 3:
        raise ShapeError(f"expected (F,H,W,3) video, got {v.shape}")
    F, H, W, _ = v.shape
    if F % 2 != 0 or H % 4 != 0 or W % 4 != 0:
        raise ShapeError(f"need even F and H,W divisible by 4, got {v.shape}")
    x = _pair_frames(np.asarray(v, dtype=np.float32)) * 2.0 - 1.0
    x = silu(conv2d(x, weights["vae.enc.conv1.w"], weights["vae.enc.conv1.b"], stride=2, pad=1))
    x = silu(conv2d(x, weights["vae.enc.conv2.w"], weights["vae.enc.conv2.b"], stride=2, pad=1))
    x = conv2d(x, weights["vae.enc.conv3.w"], weights["vae.enc.conv3.b"], stride=1, pad=0)
    return x.transpose(0, 2, 3, 1).astype(np.float32)  # (f, h, w, c)


def vae_encode(weights: dict, config: ModelConfig, v: np.ndarray) -> np.ndarray:
    z = encode_raw(weights, config, v)
    mean = weights["vae.latent_mean"]
    std = weights["vae.latent_std"]
    return snap_to_grid((z - mean) / std)


def vae_decode(weights: dict, config: ModelConfig, z: np.ndarray) -> np.ndarray:
    check_vae_weights(weights)
    if z.ndim != 4 or z.shape[3] != config.channels:
        raise ShapeError(f"expected (f,h,w,{config.channels}) latent, got {z.shape}")
    mean = weights["vae.latent_mean"]
    std = weights["vae.latent_std"]
    x = (np.asarray(z, dtype=np.float32) * std + mean).transpose(0, 3, 1, 2)
    x = silu(conv2d(x, weights["vae.dec.conv1.w"], weights["vae.dec.conv1.b"], stride=1, pad=0))
    x = upsample2x(x)
    x = silu(conv2d(x, weights["vae.dec.conv2.w"], weights["vae.dec.conv2.b"], stride=1, pad=1))
    x = upsample2x(x)
    x = silu(conv2d(x, weights["vae.dec.conv3.w"], weights["vae.dec.conv3.b"], stride=1, pad=1))
    x = conv2d(x, weights["vae.dec.conv4.w"], weights["vae.dec.conv4.b"], stride=1, pad=1)
    v = (_unpair_frames(x) + 1.0) * 0.5
    return np.clip(v, 0.0, 1.0).astype(np.float32)


def vae_decode_mask(config: ModelConfig, m: np.ndarray) -> np.ndarray:
    """Upsample a single-channel latent-resolution soft mask to pixel
    resolution using the decoder's upsampling geometry only: separable linear
    interpolation, 2x in time and 4x in space. No learned weights touch the
    values, so 0 maps to 0, 1 maps to 1, and scaling the input never raises
    any output (monotone).
    """
    if m.ndim != 3:
        raise ShapeError(f"expected (f,h,w) soft mask, got {m.shape}")
    m = np.asarray(m, dtype=np.float32)
    if m.size and (m.min() < -1e-6 or m.max() > 1.0 + 1e-6):
        raise ShapeError("soft mask values must lie in [0,1]")
    f, h, w = m.shape
    tf, sf = config.temporal_factor, config.spatial_factor

    def axis_positions(n_out: int, factor: int) -> np.ndarray:
        # output index g sits at source coordinate (g - (factor-1)/2) / factor
        return (np.arange(n_out, dtype=np.float64) - (factor - 1) / 2.0) / factor

    def interp_axis(arr: np.ndarray, axis: int, factor: int) -> np.ndarray:
        n_in = arr.shape[axis]
        pos = axis_positions(n_in * factor, factor)
        moved = np.moveaxis(arr, axis, -1)
        flat = moved.reshape(-1, n_in)
        out = np.empty((flat.shape[0], n_in * factor), dtype=np.float32)
        for r in range(flat.shape[0]):
            out[r] = np.interp(pos, np.arange(n_in, dtype=np.float64), flat[r])
        return np.moveaxis(out.reshape(*moved.shape[:-1], n_in * factor), -1, axis)

    out = interp_axis(m, 0, tf)
    out = interp_axis(out, 1, sf)
    out = interp_axis(out, 2, sf)
    return np.clip(out, 0.0, 1.0)
