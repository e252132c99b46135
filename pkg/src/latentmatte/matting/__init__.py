from .alpha import extract_alpha
from .effect import EffectMask, effect_mask_from_capture, extract_effect_mask
from .latentmask import block_occupancy, latent_mask_encode

__all__ = [
    "EffectMask",
    "effect_mask_from_capture",
    "extract_effect_mask",
    "latent_mask_encode",
    "block_occupancy",
    "extract_alpha",
]
