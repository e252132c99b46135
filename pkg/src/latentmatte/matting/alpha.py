"""Alpha mattes from latent-resolution masks via the decoder's upsampling."""

import numpy as np

from ..errors import MissingSoftMask
from ..model import vae_decode_mask
from .effect import EffectMask


def extract_alpha(effect: EffectMask, config) -> np.ndarray:
    """Full-resolution soft alpha for an effect mask.

    Only the resolution-changing part of the decoder is applied, so a hard
    latent mask comes back with soft, geometry-aligned edges.
    """
    if effect.soft is None:
        raise MissingSoftMask("effect mask carries no soft map")
    return vae_decode_mask(config, effect.soft)
