"""Model architecture knobs."""

from dataclasses import dataclass


@dataclass(frozen=True)
class ModelConfig:
    # denoiser
    layers: int = 4
    heads: int = 4
    head_dim: int = 16
    mlp_ratio: int = 4
    # latent space
    channels: int = 8
    temporal_factor: int = 2
    spatial_factor: int = 4
    # positional-embedding grid (latent extents the denoiser was built for)
    grid_frames: int = 8
    grid_h: int = 16
    grid_w: int = 16
    # vae
    vae_width: int = 32
    # sampling
    steps: int = 30

    @property
    def dim(self) -> int:
        return self.heads * self.head_dim

    @property
    def tokens_per_frame(self) -> int:
        return self.grid_h * self.grid_w

    def validate(self) -> None:
        assert self.layers >= 1 and self.heads >= 1 and self.head_dim >= 1
        assert self.temporal_factor == 2 and self.spatial_factor == 4

    def to_dict(self) -> dict:
        return {
            "layers": self.layers,
            "heads": self.heads,
            "head_dim": self.head_dim,
            "mlp_ratio": self.mlp_ratio,
            "channels": self.channels,
            "temporal_factor": self.temporal_factor,
            "spatial_factor": self.spatial_factor,
            "grid_frames": self.grid_frames,
            "grid_h": self.grid_h,
            "grid_w": self.grid_w,
            "vae_width": self.vae_width,
            "steps": self.steps,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**{k: int(v) for k, v in d.items()})
