"""Pixel masks encoded into the latent token grid via the VAE."""

import numpy as np

from ..errors import ConstantInput, EmptyMask
from ..numerics import histogram_256, otsu_threshold, quantize_256


def block_occupancy(m: np.ndarray, temporal: int = 2, spatial: int = 4) -> np.ndarray:
    """Mean mask coverage per latent cell footprint (the downsampling oracle)."""
    m = np.asarray(m, dtype=np.float32)
    frames, height, width = m.shape
    return m.reshape(
        frames // temporal, temporal, height // spatial, spatial, width // spatial, spatial
    ).mean(axis=(1, 3, 5))


def _ratio_scores(model, video: np.ndarray, z_empty: np.ndarray, z_full: np.ndarray) -> np.ndarray:
    """Per-cell score in [0,1]: relative deviation from the all-empty mask's
    encoding versus the all-full mask's. Empty cells score 0, full cells 1."""
    z = model.encode(video)
    d_empty = np.abs(z - z_empty).mean(axis=-1)
    d_full = np.abs(z - z_full).mean(axis=-1)
    return d_empty / (d_empty + d_full + 1e-12)


def _mask_video(m: np.ndarray) -> np.ndarray:
    return np.repeat(m[..., None].astype(np.float32), 3, axis=3)


def _calibration(model, shape: tuple[int, int, int]):
    """References for this video shape: the empty/full encodings plus the
    encoder's score at half-covered cells. The response depends on sub-cell
    geometry, so it is measured on static half-planes (boundary splits a cell
    column in half) and on moving half-planes (boundary advances one cell per
    latent frame). Those are the spatial-split and temporal-split extremes of
    the half-coverage response band, so the estimates are pooled by midrange."""
    cache = getattr(model, "_latentmask_calibration", None)
    if cache is None:
        cache = {}
        model._latentmask_calibration = cache
    if shape in cache:
        return cache[shape]
    frames, height, width = shape
    sp = model.config.spatial_factor
    tf = model.config.temporal_factor
    z_empty = model.encode(_mask_video(np.zeros(shape, dtype=bool)))
    z_full = model.encode(_mask_video(np.ones(shape, dtype=bool)))

    halves = []
    vert = np.zeros(shape, dtype=bool)
    vert[:, :, : width // 2 + sp // 2] = True
    col = (width // 2) // sp
    halves.append(np.median(_ratio_scores(model, _mask_video(vert), z_empty, z_full)[:, :, col]))
    horiz = np.zeros(shape, dtype=bool)
    horiz[:, : height // 2 + sp // 2, :] = True
    row = (height // 2) // sp
    halves.append(np.median(_ratio_scores(model, _mask_video(horiz), z_empty, z_full)[:, row, :]))

    # moving boundary: advances one cell per pixel frame, so the boundary
    # cell is empty in its first pixel frame and full in the second, the
    # purely temporal half-coverage geometry
    drift = np.zeros(shape, dtype=bool)
    for t in range(frames):
        drift[t, :, : min(width, sp * (t + 1))] = True
    scores = _ratio_scores(model, _mask_video(drift), z_empty, z_full)
    lf = np.arange(frames // tf)
    edge_col = np.clip(tf * lf + 1, 0, width // sp - 1)
    keep = tf * lf + 1 < width // sp
    if keep.any():
        halves.append(np.median(scores[lf[keep], :, edge_col[keep]]))

    s_half = float((min(halves) + max(halves)) / 2.0)
    if not 0.05 < s_half < 0.95:
        s_half = 0.5
    cache[shape] = (z_empty, z_full, s_half)
    return cache[shape]


_STRETCH_GAIN = 16.0


def latent_mask_encode(model, m: np.ndarray) -> np.ndarray:
    """Binary latent mask: encode the mask as an RGB video, then threshold.

    The mask is duplicated to 3 channels and pushed through the VAE encoder;
    cells score by mean absolute deviation from the all-empty encoding,
    normalized against the all-full one. Scores are contrast-stretched around
    the encoder's measured half-coverage response, so majority-covered cells
    sit near 1 and minority cells near 0 and the exact position of the Otsu
    cut over the cells is uncritical. The split is oriented by pixel-mask
    overlap as a final guard against encoders with inverted response.
    """
    m = np.asarray(m, dtype=bool)
    if m.ndim != 3:
        raise EmptyMask("mask must be (frames, height, width)")
    if not m.any():
        raise EmptyMask("cannot encode an empty mask")
    z_empty, z_full, s_half = _calibration(model, m.shape)
    scores = _ratio_scores(model, _mask_video(m), z_empty, z_full)
    scores = 1.0 / (1.0 + np.exp(-_STRETCH_GAIN * (scores - s_half)))

    occupancy = block_occupancy(m, model.config.temporal_factor, model.config.spatial_factor)
    lo, hi = float(scores.min()), float(scores.max())
    if hi <= lo:
        return np.ones(scores.shape, dtype=bool)
    norm = ((scores - lo) / (hi - lo)).astype(np.float32)
    bins = quantize_256(norm.reshape(-1))
    try:
        t = otsu_threshold(histogram_256(norm.reshape(-1)))
    except ConstantInput:
        return np.ones(scores.shape, dtype=bool)
    high = (bins >= t).reshape(scores.shape)
    if occupancy[high].mean() >= occupancy[~high].mean():
        latent = high
    else:
        latent = ~high
    if not latent.any():
        latent = occupancy >= occupancy.max()
    return latent
