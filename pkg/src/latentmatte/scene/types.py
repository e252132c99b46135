"""Scene description and generated-bundle containers."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSpec

BACKGROUND_KINDS = ("flat-gradient", "textured", "panning-textured")
SPRITE_SHAPES = ("square", "disk")


@dataclass
class Sprite:
    shape: str
    size: int
    color: tuple[float, float, float]
    velocity: tuple[float, float]  # px/frame, image space
    start: tuple[float, float]     # center (x, y) at frame 0


@dataclass
class Shadow:
    offset: tuple[int, int]  # (dx, dy), pixels
    opacity: float           # in (0, 1)


@dataclass
class Reflection:
    axis_row: int            # mirror across this row; visible below it
    attenuation: float       # in (0, 1)


@dataclass
class SceneSpec:
    frames: int = 16
    height: int = 64
    width: int = 64
    background: str = "textured"
    pan_velocity: tuple[float, float] = (0.0, 0.0)
    sprites: list[Sprite] = field(default_factory=list)
    shadow: Shadow | None = None
    reflection: Reflection | None = None
    seed: int = 0
    name: str = ""

    def validate(self) -> None:
        if self.frames < 1 or self.height < 8 or self.width < 8:
            raise InvalidSpec("frames >= 1 and height/width >= 8 required")
        if self.background not in BACKGROUND_KINDS:
            raise InvalidSpec(f"unknown background kind {self.background!r}")
        if self.background != "panning-textured" and self.pan_velocity != (0.0, 0.0):
            raise InvalidSpec("pan velocity requires panning-textured background")
        for sp in self.sprites:
            if sp.shape not in SPRITE_SHAPES:
                raise InvalidSpec(f"unknown sprite shape {sp.shape!r}")
            if sp.size < 2:
                raise InvalidSpec("sprite size must be >= 2 px")
            if not all(0.0 <= c <= 1.0 for c in sp.color):
                raise InvalidSpec("sprite color must lie in [0,1]")
        if self.shadow is not None:
            if self.shadow.offset == (0, 0):
                raise InvalidSpec("shadow offset must be nonzero")
            if not 0.0 < self.shadow.opacity < 1.0:
                raise InvalidSpec("shadow opacity must lie in (0,1)")
        if self.reflection is not None:
            if not 0 < self.reflection.axis_row < self.height - 1:
                raise InvalidSpec("reflection axis row must be inside the frame")
            if not 0.0 < self.reflection.attenuation < 1.0:
                raise InvalidSpec("reflection attenuation must lie in (0,1)")


@dataclass
class SceneBundle:
    """A rendered scene plus every piece of ground truth evaluation needs."""

    spec: SceneSpec
    composite: np.ndarray                 # (F,H,W,3) float32 in [0,1]
    background_gt: np.ndarray             # (F,H,W,3) float32
    object_masks: list[np.ndarray]        # per sprite, (F,H,W) bool
    effects_masks: list[np.ndarray]       # per sprite, object|shadow|reflection
    shadow_masks: list[np.ndarray]        # per sprite, (F,H,W) bool
    reflection_masks: list[np.ndarray]    # per sprite, (F,H,W) bool

    @property
    def pan(self) -> tuple[float, float]:
        return self.spec.pan_velocity

    def union_effects_mask(self) -> np.ndarray:
        out = np.zeros(self.composite.shape[:3], dtype=bool)
        for m in self.effects_masks:
            out |= m
        return out
