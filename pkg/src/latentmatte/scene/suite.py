"""Benchmark suites: deterministic families of scene specs, and disk layout.

A suite directory holds one subdirectory per scene:

    scene_000/
        scene.txt        spec (key = value)
        frames/          composite video
        background/      clean background
        mask_00/         object mask for sprite 0
        effects_00/      object+shadow+reflection mask for sprite 0
"""

from pathlib import Path

import numpy as np

from ..errors import EmptySuite, InvalidSpec
from ..numerics import SeededRng
from .io import (
    load_mask_video,
    load_scene_spec,
    load_video,
    save_mask_video,
    save_scene_spec,
    save_video,
)
from .synth import synthesize
from .types import Reflection, SceneBundle, SceneSpec, Shadow, Sprite


def _feasible_start(size: int, v: float, extent: int, frames: int, rng: SeededRng) -> tuple[float, float]:
    """A start coordinate keeping the sprite fully inside [0, extent) at all
    frames, and the possibly reduced velocity that makes that possible."""
    half = size // 2 + 1
    while True:
        span = v * (frames - 1)
        lo = half - min(0.0, span)
        hi = (extent - 1 - half) - max(0.0, span)
        if lo <= hi:
            start = lo + float(rng.uniform(())) * (hi - lo)
            return float(np.round(start)), v
        v = float(np.sign(v)) * (abs(v) - 1)
        if v == 0:
            return extent / 2.0, 0.0


def _make_scene(k: int, rng: SeededRng, frames: int = 16, side: int = 64) -> SceneSpec:
    kind_slot = k % 5
    if kind_slot == 0:
        background, pan = "flat-gradient", (0.0, 0.0)
    elif kind_slot == 1:
        background, pan = "textured", (0.0, 0.0)
    else:
        background = "panning-textured"
        options = [-2.0, -1.0, 1.0, 2.0]
        pan = (
            options[int(rng.integers(0, 4))],
            options[int(rng.integers(0, 4))],
        )

    shape = "square" if k % 2 == 0 else "disk"
    size = 8 + (k % 4) * 2
    color = tuple(float(c) for c in rng.uniform((3,)) * 0.75 + 0.15)

    # sprite must move relative to the background so occluded content is
    # revealed in other frames (image-space background motion is -pan)
    while True:
        vx = float(rng.integers(-2, 3))
        vy = float(rng.integers(-2, 3))
        rel = (vx + pan[0], vy + pan[1])
        if rel != (0.0, 0.0) and (vx, vy) != (0.0, 0.0):
            break

    reflective = kind_slot == 4
    sx, vx = _feasible_start(size, vx, side, frames, rng)
    if reflective:
        # keep the sprite in the upper half so the mirror row fits below it
        vy = max(-1.0, min(1.0, vy))
        half = size // 2 + 1
        span = vy * (frames - 1)
        sy = half + 6 - min(0.0, span)
        max_y = sy + max(0.0, span) + size // 2
        axis_row = int(min(max_y + 3, side - 8))
        reflection = Reflection(axis_row=axis_row, attenuation=0.3 + 0.2 * float(rng.uniform(())))
        shadow = None
    else:
        sy, vy = _feasible_start(size, vy, side, frames, rng)
        signs = [-1, 1]
        shadow = Shadow(
            offset=(
                signs[int(rng.integers(0, 2))] * int(rng.integers(3, 6)),
                signs[int(rng.integers(0, 2))] * int(rng.integers(3, 6)),
            ),
            opacity=0.35 + 0.25 * float(rng.uniform(())),
        )
        reflection = None

    return SceneSpec(
        frames=frames,
        height=side,
        width=side,
        background=background,
        pan_velocity=pan,
        sprites=[Sprite(shape=shape, size=size, color=color, velocity=(vx, vy), start=(sx, sy))],
        shadow=shadow,
        reflection=reflection,
        seed=int(rng.integers(0, 2**31)),
        name=f"scene_{k:03d}",
    )


def make_default_suite(seed: int = 0, count: int = 20) -> list[SceneSpec]:
    """The benchmark suite: single-sprite scenes, >= half with camera pan."""
    root = SeededRng(seed)
    return [_make_scene(k, root.child(f"suite{k}")) for k in range(count)]


def make_training_suite(seed: int = 0, count: int = 48) -> list[SceneSpec]:
    root = SeededRng(seed).child("training")
    return [_make_scene(k, root.child(f"train{k}")) for k in range(count)]


def make_holdout_suite(seed: int = 0, count: int = 10) -> list[SceneSpec]:
    root = SeededRng(seed).child("holdout")
    return [_make_scene(k, root.child(f"hold{k}")) for k in range(count)]


def save_bundle(directory: str | Path, bundle: SceneBundle) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_scene_spec(directory / "scene.txt", bundle.spec)
    save_video(directory / "frames", bundle.composite)
    save_video(directory / "background", bundle.background_gt)
    for k in range(len(bundle.object_masks)):
        save_mask_video(directory / f"mask_{k:02d}", bundle.object_masks[k])
        save_mask_video(directory / f"effects_{k:02d}", bundle.effects_masks[k])


def load_bundle(directory: str | Path) -> SceneBundle:
    """Rebuild a bundle from disk. Pixel data comes from the PNGs; the
    shadow/reflection masks are re-derived from the spec's geometry."""
    directory = Path(directory)
    spec = load_scene_spec(directory / "scene.txt")
    regen = synthesize(spec)
    composite = load_video(directory / "frames")
    background = load_video(directory / "background")
    object_masks = []
    effects_masks = []
    for k in range(len(spec.sprites)):
        object_masks.append(load_mask_video(directory / f"mask_{k:02d}"))
        effects_masks.append(load_mask_video(directory / f"effects_{k:02d}"))
    return SceneBundle(
        spec=spec,
        composite=composite,
        background_gt=background,
        object_masks=object_masks,
        effects_masks=effects_masks,
        shadow_masks=regen.shadow_masks,
        reflection_masks=regen.reflection_masks,
    )


def save_suite(directory: str | Path, specs: list[SceneSpec]) -> list[Path]:
    directory = Path(directory)
    paths = []
    for k, spec in enumerate(specs):
        sub = directory / (spec.name or f"scene_{k:03d}")
        save_bundle(sub, synthesize(spec))
        paths.append(sub)
    return paths


def suite_scene_dirs(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    dirs = sorted(p for p in directory.iterdir() if p.is_dir() and (p / "scene.txt").exists())
    if not dirs:
        raise EmptySuite(f"no scenes under {directory}")
    return dirs


def load_suite(directory: str | Path) -> list[SceneBundle]:
    return [load_bundle(p) for p in suite_scene_dirs(directory)]
