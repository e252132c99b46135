"""Renders parametric scenes with analytic shadows, reflections, and motion.

Background motion model: a world texture is sampled at (x + vx*t, y + vy*t),
so image content shifts by (-vx, -vy) per frame and the point seen at (x, y)
in frame i appears at (x - vx*(j-i), y - vy*(j-i)) in frame j. That mapping
is the scene's exact correspondence oracle.
"""

import numpy as np

from ..errors import InvalidSpec, OutOfBounds
from ..numerics import SeededRng
from ..tracking.types import TrackSet
from .types import SceneBundle, SceneSpec, Sprite

_COARSE = 12  # texture grid cells per image side


def _texture_grid(rng: SeededRng) -> np.ndarray:
    g = rng.uniform((_COARSE, _COARSE, 3)) * 0.8 + 0.1
    return g.astype(np.float32)


def _sample_texture(grid: np.ndarray, ox: float, oy: float, h: int, w: int) -> np.ndarray:
    """Bilinear sample of the wrapped coarse grid at world offset (ox, oy)."""
    gh, gw, _ = grid.shape
    cell_x = w / gw
    cell_y = h / gh
    xs = (np.arange(w, dtype=np.float64) + ox) / cell_x
    ys = (np.arange(h, dtype=np.float64) + oy) / cell_y
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = (xs - x0).astype(np.float32)[None, :, None]
    fy = (ys - y0).astype(np.float32)[:, None, None]
    x0 %= gw
    y0 %= gh
    x1 = (x0 + 1) % gw
    y1 = (y0 + 1) % gh
    g00 = grid[np.ix_(y0, x0)]
    g01 = grid[np.ix_(y0, x1)]
    g10 = grid[np.ix_(y1, x0)]
    g11 = grid[np.ix_(y1, x1)]
    top = g00 * (1 - fx) + g01 * fx
    bot = g10 * (1 - fx) + g11 * fx
    return (top * (1 - fy) + bot * fy).astype(np.float32)


def _background_video(spec: SceneSpec, rng: SeededRng) -> np.ndarray:
    F, H, W = spec.frames, spec.height, spec.width
    out = np.empty((F, H, W, 3), dtype=np.float32)
    if spec.background == "flat-gradient":
        base = rng.uniform((3,)) * 0.5 + 0.2
        gx = (rng.uniform((3,)) - 0.5) * 0.5
        gy = (rng.uniform((3,)) - 0.5) * 0.5
        xs = np.arange(W, dtype=np.float32)[None, :, None] / max(W - 1, 1)
        ys = np.arange(H, dtype=np.float32)[:, None, None] / max(H - 1, 1)
        frame = base[None, None, :] + gx * xs + gy * ys
        out[:] = np.clip(frame, 0.05, 0.95)[None]
    else:
        grid = _texture_grid(rng)
        vx, vy = spec.pan_velocity
        for i in range(F):
            out[i] = _sample_texture(grid, vx * i, vy * i, H, W)
    return out


def _silhouette(sprite: Sprite, frame: int, h: int, w: int) -> np.ndarray:
    cx = int(round(sprite.start[0] + sprite.velocity[0] * frame))
    cy = int(round(sprite.start[1] + sprite.velocity[1] * frame))
    mask = np.zeros((h, w), dtype=bool)
    s = sprite.size
    if sprite.shape == "square":
        x0, y0 = cx - s // 2, cy - s // 2
        xs0, ys0 = max(x0, 0), max(y0, 0)
        xs1, ys1 = min(x0 + s, w), min(y0 + s, h)
        if xs0 < xs1 and ys0 < ys1:
            mask[ys0:ys1, xs0:xs1] = True
    else:
        r = s / 2.0
        yy, xx = np.mgrid[0:h, 0:w]
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    return mask


def _shift_mask(mask: np.ndarray, dx: int, dy: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys, xs = np.nonzero(mask)
    ys2, xs2 = ys + dy, xs + dx
    keep = (ys2 >= 0) & (ys2 < h) & (xs2 >= 0) & (xs2 < w)
    out[ys2[keep], xs2[keep]] = True
    return out


def _mirror_mask(mask: np.ndarray, axis_row: int) -> np.ndarray:
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys, xs = np.nonzero(mask)
    ys2 = 2 * axis_row - ys
    keep = (ys2 > axis_row) & (ys2 < h)
    out[ys2[keep], xs[keep]] = True
    return out


def synthesize(spec: SceneSpec) -> SceneBundle:
    """Render the scene; deterministic per spec.seed."""
    spec.validate()
    F, H, W = spec.frames, spec.height, spec.width
    rng = SeededRng(spec.seed).child("scene-render")
    # backgrounds land on the 8-bit grid up front so composites re-rendered
    # from the stored background match the stored composite exactly
    background = _background_video(spec, rng)
    background = (np.round(background * 255.0) / np.float32(255.0)).astype(np.float32)
    composite = background.copy()

    n = len(spec.sprites)
    object_masks = [np.zeros((F, H, W), dtype=bool) for _ in range(n)]
    shadow_masks = [np.zeros((F, H, W), dtype=bool) for _ in range(n)]
    reflection_masks = [np.zeros((F, H, W), dtype=bool) for _ in range(n)]

    for k, sprite in enumerate(spec.sprites):
        frames_visible = 0
        for i in range(F):
            sil = _silhouette(sprite, i, H, W)
            if sil.any():
                frames_visible += 1
            object_masks[k][i] = sil
            if spec.shadow is not None:
                shadow_masks[k][i] = _shift_mask(
                    sil, spec.shadow.offset[0], spec.shadow.offset[1]
                )
            if spec.reflection is not None:
                reflection_masks[k][i] = _mirror_mask(sil, spec.reflection.axis_row)
        if frames_visible * 2 < F:
            raise InvalidSpec(
                f"sprite {k} visible only {frames_visible}/{F} frames (needs >= half)"
            )

    # effects first (they darken/tint the background), sprites on top
    for k, sprite in enumerate(spec.sprites):
        if spec.shadow is not None:
            op = np.float32(spec.shadow.opacity)
            for i in range(F):
                m = shadow_masks[k][i]
                composite[i][m] = background[i][m] * (np.float32(1.0) - op)
        if spec.reflection is not None:
            att = np.float32(spec.reflection.attenuation)
            color = np.asarray(sprite.color, dtype=np.float32)
            for i in range(F):
                m = reflection_masks[k][i]
                composite[i][m] = background[i][m] * (np.float32(1.0) - att) + color * att
    for k, sprite in enumerate(spec.sprites):
        color = np.asarray(sprite.color, dtype=np.float32)
        for i in range(F):
            composite[i][object_masks[k][i]] = color

    effects_masks = [
        object_masks[k] | shadow_masks[k] | reflection_masks[k] for k in range(n)
    ]
    composite = (np.round(composite * 255.0) / np.float32(255.0)).astype(np.float32)
    return SceneBundle(
        spec=spec,
        composite=composite,
        background_gt=background,
        object_masks=object_masks,
        effects_masks=effects_masks,
        shadow_masks=shadow_masks,
        reflection_masks=reflection_masks,
    )


def oracle_tracks(bundle: SceneBundle, points: list[tuple[int, float, float]]) -> TrackSet:
    """Exact background correspondences from the analytic motion model.

    Each queried (frame, x, y) is followed through every frame; validity turns
    false where the corresponding location leaves the frame.
    """
    spec = bundle.spec
    F, H, W = spec.frames, spec.height, spec.width
    vx, vy = bundle.pan
    n = len(points)
    source_frames = np.zeros(n, dtype=np.int64)
    positions = np.zeros((n, F, 2), dtype=np.float32)
    valid = np.zeros((n, F), dtype=bool)
    for s, (i, x, y) in enumerate(points):
        if not (0 <= i < F and 0 <= x <= W - 1 and 0 <= y <= H - 1):
            raise OutOfBounds(f"point {(i, x, y)} outside frame bounds")
        source_frames[s] = i
        for j in range(F):
            xj = x - vx * (j - i)
            yj = y - vy * (j - i)
            positions[s, j] = (xj, yj)
            valid[s, j] = (0 <= xj <= W - 1) and (0 <= yj <= H - 1)
    return TrackSet(source_frames=source_frames, positions=positions, valid=valid, frames=F)
