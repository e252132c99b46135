"""LatentModel: weights + config + the operations the pipelines call."""

from pathlib import Path

import numpy as np

from ..errors import NoCheckpoint
from ..numerics import NoiseSchedule
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .denoiser import AttentionCapture, check_denoiser_weights, denoise_step
from .sampler import sample
from .vae import check_vae_weights, encode_raw, vae_decode, vae_decode_mask, vae_encode


class LatentModel:
    def __init__(self, weights: dict, config: ModelConfig, meta: dict | None = None):
        self.weights = weights
        self.config = config
        self.meta = meta or {}

    @classmethod
    def load(cls, directory: str | Path) -> "LatentModel":
        weights, config, meta = load_checkpoint(directory)
        return cls(weights, config, meta)

    def save(self, directory: str | Path) -> None:
        save_checkpoint(directory, self.weights, self.config, self.meta)

    # --- vae ---
    def encode(self, v: np.ndarray) -> np.ndarray:
        return vae_encode(self.weights, self.config, v)

    def encode_raw(self, v: np.ndarray) -> np.ndarray:
        return encode_raw(self.weights, self.config, v)

    def decode(self, z: np.ndarray) -> np.ndarray:
        return vae_decode(self.weights, self.config, z)

    def decode_mask(self, m: np.ndarray) -> np.ndarray:
        return vae_decode_mask(self.config, m)

    # --- denoiser ---
    def denoise_step(self, z_t, t, hooks=(), capture: AttentionCapture | None = None):
        return denoise_step(self.weights, self.config, z_t, t, hooks, capture)

    def sample(self, z_T, sched=None, hooks=(), per_step_callback=None, t_start: int = 0):
        sched = sched or self.schedule()
        return sample(
            lambda z, t, h: self.denoise_step(z, t, h),
            z_T,
            sched,
            hooks=hooks,
            per_step_callback=per_step_callback,
            t_start=t_start,
        )

    def schedule(self, steps: int | None = None) -> NoiseSchedule:
        return NoiseSchedule.linear(steps or self.config.steps)

    def require_vae(self) -> None:
        check_vae_weights(self.weights)

    def require_denoiser(self) -> None:
        check_denoiser_weights(self.weights, self.config)

    def latent_shape(self, F: int, H: int, W: int) -> tuple[int, int, int, int]:
        c = self.config
        return (
            (F + c.temporal_factor - 1) // c.temporal_factor,
            H // c.spatial_factor,
            W // c.spatial_factor,
            c.channels,
        )
