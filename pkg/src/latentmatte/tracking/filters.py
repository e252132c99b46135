"""Correspondence filtering against the foreground mask."""

import numpy as np

from ..errors import ShapeError
from .types import TrackSet


def filter_background(tracks: TrackSet, mask: np.ndarray) -> TrackSet:
    """Invalidate correspondences that land inside the mask of their frame.

    Source rows are left untouched: the query point sits on the object by
    construction, only its cross-frame matches must be background.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3 or mask.shape[0] != tracks.frames:
        raise ShapeError(f"mask frames {mask.shape} do not align with tracks ({tracks.frames})")
    _, height, width = mask.shape
    xs = np.clip(np.rint(tracks.positions[:, :, 0]).astype(np.int64), 0, width - 1)
    ys = np.clip(np.rint(tracks.positions[:, :, 1]).astype(np.int64), 0, height - 1)
    frame_idx = np.broadcast_to(np.arange(tracks.frames), xs.shape)
    hits = mask[frame_idx, ys, xs]
    own = frame_idx == tracks.source_frames[:, None]
    new_valid = tracks.valid & (own | ~hits)
    return TrackSet(
        source_frames=tracks.source_frames.copy(),
        positions=tracks.positions.copy(),
        valid=new_valid,
        frames=tracks.frames,
    )
