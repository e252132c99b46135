"""Mapping pixel tracks onto the latent token grid."""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from .types import TrackSet


@dataclass
class TokenCorrespondence:
    """One masked query token with its cross-frame and in-frame support.

    query: (latent frame, token index). background: cross-frame background
    tokens as (latent frame, token index), at most one per frame. surround:
    in-frame background token indices near the query.
    """

    query: tuple[int, int]
    background: list[tuple[int, int]] = field(default_factory=list)
    surround: list[int] = field(default_factory=list)


def pixel_to_token(frame: int, x: int, y: int, latent_w: int,
                   temporal_factor: int = 2, spatial_factor: int = 4) -> tuple[int, int]:
    return frame // temporal_factor, (int(y) // spatial_factor) * latent_w + int(x) // spatial_factor


def _surround(qf: int, p: int, latent_mask: np.ndarray, radius: int) -> list[int]:
    f, h, w = latent_mask.shape
    qy, qx = divmod(p, w)
    y0, y1 = max(0, qy - radius), min(h - 1, qy + radius)
    x0, x1 = max(0, qx - radius), min(w - 1, qx + radius)
    out = []
    for yy in range(y0, y1 + 1):
        for xx in range(x0, x1 + 1):
            token = yy * w + xx
            if token != p and not latent_mask[qf, yy, xx]:
                out.append(token)
    return out


def to_token_correspondences(
    tracks: TrackSet,
    latent_mask: np.ndarray,
    surround_radius: int = 4,
    temporal_factor: int = 2,
    spatial_factor: int = 4,
) -> list[TokenCorrespondence]:
    """Collapse pixel tracks to per-token correspondence sets.

    One entry per distinct query token. Cross-frame matches are deduplicated
    to at most one background token per latent frame by vote count (ties go
    to the lower token index); matches falling in the query's own latent
    frame or inside the latent mask are dropped.
    """
    latent_mask = np.asarray(latent_mask, dtype=bool)
    if latent_mask.ndim != 3:
        raise ShapeError("latent_mask must be (latent frames, h, w)")
    f, h, w = latent_mask.shape

    # votes[(query token)][target latent frame] -> Counter of candidate tokens
    votes: dict[tuple[int, int], dict[int, Counter]] = {}
    order: list[tuple[int, int]] = []
    flat_mask = latent_mask.reshape(f, h * w)

    for s in range(tracks.n_sources):
        i = int(tracks.source_frames[s])
        sx, sy = tracks.source_xy(s)
        query = pixel_to_token(i, int(sx), int(sy), w, temporal_factor, spatial_factor)
        if query[0] >= f or query[1] >= h * w:
            continue
        if query not in votes:
            votes[query] = {}
            order.append(query)
        per_frame = votes[query]
        for j, x, y in tracks.correspondences(s):
            jf, token = pixel_to_token(j, int(round(x)), int(round(y)), w,
                                       temporal_factor, spatial_factor)
            if jf == query[0] or jf >= f or token >= h * w:
                continue
            if flat_mask[jf, token]:
                continue
            per_frame.setdefault(jf, Counter())[token] += 1

    out = []
    for query in order:
        background = []
        for jf in sorted(votes[query]):
            counter = votes[query][jf]
            top = max(counter.values())
            token = min(t for t, c in counter.items() if c == top)
            background.append((jf, token))
        out.append(
            TokenCorrespondence(
                query=query,
                background=background,
                surround=_surround(query[0], query[1], latent_mask, surround_radius),
            )
        )
    return out
