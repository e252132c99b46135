"""Unguided removal baselines the guided method is benchmarked against."""

import numpy as np

from ..errors import ConfigError
from ..matting import latent_mask_encode
from ..numerics import SeededRng, snap_to_grid
from .removal import expand_object_masks, remove_objects, union_mask
from .types import RemovalRequest


def baseline_plain(model, req: RemovalRequest):
    """Injection-only removal: the identical sampler loop with no guidance
    hooks. Returns (V_bg, Z_bg)."""
    return remove_objects(model, req, enable_guidance=False)


def baseline_renoise(model, req: RemovalRequest,
                     strength_in: float = 1.0, strength_out: float = 0.6):
    """Regional renoising: heavy noise inside the mask, lighter elsewhere,
    then a full denoise from the heavier level. Returns (V_bg, Z_bg).

    Both strengths zero is the encode/decode round trip. The unmasked region
    enters the sampler cleaner than the step level implies, which is the
    background-drift failure mode this baseline exists to demonstrate.
    """
    req.validate()
    for name, s in (("strength_in", strength_in), ("strength_out", strength_out)):
        if not 0.0 <= s <= 1.0:
            raise ConfigError(f"{name} must lie in [0,1], got {s}")
    model.require_vae()
    z0 = model.encode(req.video)
    sched = model.schedule(req.steps)
    t_in = int(round((1.0 - strength_in) * sched.T))
    t_out = int(round((1.0 - strength_out) * sched.T))

    if req.masks:
        pixel_mask = union_mask(expand_object_masks(model, req))
        region = latent_mask_encode(model, pixel_mask)[..., None]
    else:
        region = np.zeros(z0.shape[:3], dtype=bool)[..., None]

    rng = SeededRng(req.seed).child("renoise")
    eps = rng.normal(z0.shape)

    def at_level(t):
        if t == sched.T:
            return z0.copy()
        return np.float32(sched.alpha(t)) * z0 + np.float32(sched.sigma(t)) * eps

    z = np.where(region, at_level(t_in), at_level(t_out)).astype(np.float32)
    t_start = min(t_in, t_out)
    if t_start < sched.T:
        model.require_denoiser()
        z = model.sample(z, sched, t_start=t_start)
    z = snap_to_grid(z)
    return model.decode(z), z
