"""Request and result records for the removal and layering pipelines."""

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigError, ShapeError

TRACKERS = ("oracle", "blockmatch")


@dataclass
class RemovalRequest:
    """Inputs for one removal job.

    `masks` holds one boolean (F, H, W) mask per object. `scene` carries the
    synthetic ground truth bundle and is required only by the oracle tracker.
    """

    video: np.ndarray
    masks: list[np.ndarray] = field(default_factory=list)
    use_effect_mask: bool = True
    use_temporal: bool = True
    use_spatial: bool = True
    tracker: str = "blockmatch"
    density: float = 0.6
    steps: int = 30
    seed: int = 0
    scene: object = None

    def validate(self) -> None:
        v = np.asarray(self.video)
        if v.ndim != 4 or v.shape[3] != 3:
            raise ShapeError(f"expected (F,H,W,3) video, got {v.shape}")
        for k, m in enumerate(self.masks):
            m = np.asarray(m)
            if m.shape != v.shape[:3]:
                raise ShapeError(
                    f"mask {k} shape {m.shape} does not align with video {v.shape[:3]}"
                )
        if not 0.0 < self.density <= 1.0:
            raise ConfigError(f"density must lie in (0,1], got {self.density}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.tracker not in TRACKERS:
            raise ConfigError(f"tracker must be one of {TRACKERS}, got {self.tracker!r}")
        if self.tracker == "oracle" and self.scene is None:
            raise ConfigError("oracle tracker needs the scene ground truth bundle")

    def without_object(self, target: int) -> "RemovalRequest":
        masks = [m for k, m in enumerate(self.masks) if k != target]
        return replace(self, masks=masks)


@dataclass
class ForegroundLayer:
    """One extracted object layer: RGB video, object latent, pixel alpha."""

    video: np.ndarray
    latent: np.ndarray
    alpha: np.ndarray


@dataclass
class LayerSet:
    """Decomposition of a video: clean background plus one layer per object."""

    background_video: np.ndarray
    background_latent: np.ndarray
    layers: list[ForegroundLayer] = field(default_factory=list)
