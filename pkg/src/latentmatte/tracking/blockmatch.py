"""Normalized-cross-correlation block matching across frames.

Tracks walk outward from the source frame one frame at a time, re-centering
each search on the previous frame's match, so steady motion larger than the
search radius per clip is still followed as long as the per-frame step fits.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError, OutOfBounds
from .types import TrackSet

VALID_CORRELATION = 0.7
_VAR_EPS = 1e-10


def _offsets(radius: int) -> np.ndarray:
    """Candidate displacements ordered by Chebyshev ring, so exact correlation
    ties resolve to the smallest displacement."""
    grid = [(dy, dx) for dy in range(-radius, radius + 1) for dx in range(-radius, radius + 1)]
    grid.sort(key=lambda d: (max(abs(d[0]), abs(d[1])), d[0], d[1]))
    return np.array(grid, dtype=np.int64)


def _match_batch(frame_gray, patches, centers, offsets, window):
    """Best NCC match for each patch around its center. Returns (xy, ok)."""
    half = window // 2
    height, width = frame_gray.shape
    windows = sliding_window_view(frame_gray, (window, window))
    top = centers[:, 1, None] - half + offsets[None, :, 0]
    left = centers[:, 0, None] - half + offsets[None, :, 1]
    feasible = (
        (top >= 0)
        & (top <= height - window)
        & (left >= 0)
        & (left <= width - window)
    )
    cand = windows[top.clip(0, height - window), left.clip(0, width - window)]
    cand = cand.reshape(cand.shape[0], cand.shape[1], -1)
    cand = cand - cand.mean(axis=2, keepdims=True)
    cand_norm = np.sqrt((cand * cand).sum(axis=2))

    flat = patches.reshape(patches.shape[0], -1)
    flat = flat - flat.mean(axis=1, keepdims=True)
    patch_norm = np.sqrt((flat * flat).sum(axis=1))

    corr = np.einsum("nkp,np->nk", cand, flat)
    denom = cand_norm * patch_norm[:, None]
    corr = np.where(denom > _VAR_EPS, corr / np.maximum(denom, _VAR_EPS), 0.0)
    corr = np.where(feasible, corr, -2.0)

    best = corr.argmax(axis=1)
    rows = np.arange(best.size)
    best_corr = corr[rows, best]
    xy = np.stack(
        [centers[:, 0] + offsets[best, 1], centers[:, 1] + offsets[best, 0]], axis=1
    )
    ok = best_corr >= VALID_CORRELATION
    return xy, ok


def track_block_match(
    video: np.ndarray,
    points,
    window: int = 7,
    search_radius: int = 6,
) -> TrackSet:
    """Track each (frame, x, y) point across all frames of the video."""
    if window % 2 != 1 or window < 3:
        raise ConfigError(f"window must be odd and >= 3, got {window}")
    if search_radius < 1:
        raise ConfigError(f"search_radius must be >= 1, got {search_radius}")
    frames, height, width = video.shape[:3]
    pts = list(points)
    for frame, x, y in pts:
        if not (0 <= frame < frames and 0 <= x < width and 0 <= y < height):
            raise OutOfBounds(f"point ({frame}, {x}, {y}) outside the video")

    gray = video.mean(axis=-1).astype(np.float32) if video.ndim == 4 else video.astype(np.float32)
    half = window // 2
    offsets = _offsets(search_radius)

    n = len(pts)
    source_frames = np.array([p[0] for p in pts], dtype=np.int64)
    positions = np.zeros((n, frames, 2), dtype=np.float32)
    valid = np.zeros((n, frames), dtype=bool)

    for i in range(frames):
        rows = np.nonzero(source_frames == i)[0]
        if rows.size == 0:
            continue
        xy0 = np.array([[pts[r][1], pts[r][2]] for r in rows], dtype=np.int64)
        positions[rows, i] = xy0
        valid[rows, i] = True

        # source patch must fit inside the frame to be matchable
        fits = (
            (xy0[:, 0] >= half)
            & (xy0[:, 0] < width - half)
            & (xy0[:, 1] >= half)
            & (xy0[:, 1] < height - half)
        )
        track_rows = rows[fits]
        if track_rows.size == 0:
            continue
        src_xy = xy0[fits]
        patches = np.stack(
            [
                gray[i, y - half : y + half + 1, x - half : x + half + 1]
                for x, y in src_xy
            ]
        )
        for direction in (1, -1):
            centers = src_xy.copy()
            j = i + direction
            while 0 <= j < frames:
                xy, ok = _match_batch(gray[j], patches, centers, offsets, window)
                positions[track_rows, j] = xy
                valid[track_rows, j] = ok
                centers = np.where(ok[:, None], xy, centers).astype(np.int64)
                j += direction

    return TrackSet(source_frames=source_frames, positions=positions, valid=valid, frames=frames)
