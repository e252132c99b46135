"""Frame-directory and scene-config file formats.

Videos are directories of 8-bit RGB PNGs named frame_0000.png, frame_0001.png,
... ; masks are grayscale PNGs with values 0/255. Scene specs are plain-text
key = value files.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ConfigError, ShapeError
from .types import Reflection, SceneSpec, Shadow, Sprite


def save_video(directory: str | Path, video: np.ndarray) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if video.ndim != 4 or video.shape[3] != 3:
        raise ShapeError(f"expected (F,H,W,3) video, got {video.shape}")
    for i, frame in enumerate(video):
        arr = np.clip(np.round(frame * 255.0), 0, 255).astype(np.uint8)
        Image.fromarray(arr, mode="RGB").save(directory / f"frame_{i:04d}.png")


def load_video(directory: str | Path) -> np.ndarray:
    directory = Path(directory)
    paths = sorted(directory.glob("frame_*.png"))
    if not paths:
        raise ShapeError(f"no frame_*.png files in {directory}")
    frames = [np.asarray(Image.open(p).convert("RGB"), dtype=np.float32) / 255.0 for p in paths]
    return np.stack(frames)


def save_mask_video(directory: str | Path, mask: np.ndarray) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if mask.ndim != 3:
        raise ShapeError(f"expected (F,H,W) mask, got {mask.shape}")
    for i, frame in enumerate(mask):
        arr = np.where(frame.astype(bool), 255, 0).astype(np.uint8)
        Image.fromarray(arr, mode="L").save(directory / f"frame_{i:04d}.png")


def load_mask_video(directory: str | Path) -> np.ndarray:
    directory = Path(directory)
    paths = sorted(directory.glob("frame_*.png"))
    if not paths:
        raise ShapeError(f"no frame_*.png files in {directory}")
    frames = [np.asarray(Image.open(p).convert("L")) >= 128 for p in paths]
    return np.stack(frames)


def save_soft_mask_video(directory: str | Path, mask: np.ndarray) -> None:
    """Soft [0,1] masks exported as 8-bit grayscale."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(mask):
        arr = np.clip(np.round(frame * 255.0), 0, 255).astype(np.uint8)
        Image.fromarray(arr, mode="L").save(directory / f"frame_{i:04d}.png")


def _fmt_floats(values) -> str:
    return ":".join(f"{float(v):g}" for v in values)


def save_scene_spec(path: str | Path, spec: SceneSpec) -> None:
    lines = [
        f"name = {spec.name}",
        f"frames = {spec.frames}",
        f"height = {spec.height}",
        f"width = {spec.width}",
        f"background = {spec.background}",
        f"pan_velocity = {_fmt_floats(spec.pan_velocity)}",
        f"seed = {spec.seed}",
    ]
    for sp in spec.sprites:
        lines.append(
            "sprite = %s:%d:%s:%s:%s"
            % (sp.shape, sp.size, _fmt_floats(sp.color).replace(":", ","),
               _fmt_floats(sp.velocity).replace(":", ","),
               _fmt_floats(sp.start).replace(":", ","))
        )
    if spec.shadow is not None:
        lines.append(
            f"shadow = {spec.shadow.offset[0]}:{spec.shadow.offset[1]}:{spec.shadow.opacity:g}"
        )
    if spec.reflection is not None:
        lines.append(
            f"reflection = {spec.reflection.axis_row}:{spec.reflection.attenuation:g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_scene_spec(path: str | Path) -> SceneSpec:
    spec = SceneSpec(sprites=[])
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"bad scene line: {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key == "name":
                spec.name = value
            elif key == "frames":
                spec.frames = int(value)
            elif key == "height":
                spec.height = int(value)
            elif key == "width":
                spec.width = int(value)
            elif key == "background":
                spec.background = value
            elif key == "pan_velocity":
                vx, vy = value.split(":")
                spec.pan_velocity = (float(vx), float(vy))
            elif key == "seed":
                spec.seed = int(value)
            elif key == "sprite":
                shape, size, color, vel, start = value.split(":")
                spec.sprites.append(
                    Sprite(
                        shape=shape,
                        size=int(size),
                        color=tuple(float(c) for c in color.split(",")),
                        velocity=tuple(float(c) for c in vel.split(",")),
                        start=tuple(float(c) for c in start.split(",")),
                    )
                )
            elif key == "shadow":
                dx, dy, op = value.split(":")
                spec.shadow = Shadow(offset=(int(dx), int(dy)), opacity=float(op))
            elif key == "reflection":
                row, att = value.split(":")
                spec.reflection = Reflection(axis_row=int(row), attenuation=float(att))
            else:
                raise ConfigError(f"unknown scene key {key!r}")
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cannot parse scene line {raw!r}: {exc}") from exc
    spec.validate()
    return spec
