"""Toy latent video model: VAE-lite, transformer denoiser, sampler, trainers."""

from .bundle import LatentModel
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .denoiser import AttentionCapture, denoise_step
from .sampler import sample
from .vae import vae_decode, vae_decode_mask, vae_encode

__all__ = [
    "AttentionCapture",
    "LatentModel",
    "ModelConfig",
    "denoise_step",
    "load_checkpoint",
    "sample",
    "save_checkpoint",
    "vae_decode",
    "vae_decode_mask",
    "vae_encode",
]
