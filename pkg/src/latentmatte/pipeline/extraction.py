"""Foreground layer extraction by latent subtraction plus pixel injection."""

import logging

import numpy as np

from ..errors import DegenerateMask, ShapeError, UnknownObject
from ..matting import extract_alpha, extract_effect_mask, latent_mask_encode
from ..numerics import SeededRng
from .removal import remove_objects
from .types import ForegroundLayer, LayerSet, RemovalRequest

log = logging.getLogger(__name__)


def _threshold(z_obj: np.ndarray, tau: float | None) -> np.ndarray:
    """Zero cells with |z| below tau; default tau is half the std of z_obj."""
    if tau is None:
        tau = 0.5 * float(np.std(z_obj))
    return np.where(np.abs(z_obj) < np.float32(tau), np.float32(0.0), z_obj)


def _object_alpha(model, video: np.ndarray, mask: np.ndarray, seed: int) -> np.ndarray:
    """Pixel alpha decoded from the soft effects mask; falls back to the
    latent object mask when attention gives a constant map."""
    try:
        effect = extract_effect_mask(model, video, mask,
                                     rng=SeededRng(seed).child("effect"))
        return extract_alpha(effect, model.config)
    except DegenerateMask:
        log.info("soft effects mask degenerate; alpha from latent object mask")
        latent = latent_mask_encode(model, mask).astype(np.float32)
        return model.decode_mask(latent)


def inject_pixels(inside: np.ndarray, outside: np.ndarray,
                  mask: np.ndarray) -> np.ndarray:
    """Per-pixel selection: masked pixels come from `inside`, the rest from
    `outside`. The mask is binary, so every output pixel equals one of the
    two inputs bit-exactly."""
    inside = np.asarray(inside)
    outside = np.asarray(outside)
    if inside.shape != outside.shape:
        raise ShapeError(f"video shapes differ: {inside.shape} vs {outside.shape}")
    if mask.shape != inside.shape[:3]:
        raise ShapeError(f"mask {mask.shape} does not match video {inside.shape}")
    mp = np.asarray(mask, dtype=np.float32)[..., None]
    return (mp * inside + (1.0 - mp) * outside).astype(np.float32)


def _layer_from_latents(model, req: RemovalRequest, target: int,
                        z_keep: np.ndarray, v_keep: np.ndarray,
                        z_bg: np.ndarray, tau: float | None) -> ForegroundLayer:
    z_obj = _threshold(z_keep - z_bg, tau)
    v_obj = model.decode(z_obj)
    blended = inject_pixels(v_keep, v_obj, req.masks[target])
    alpha = _object_alpha(model, req.video, req.masks[target], req.seed)
    return ForegroundLayer(video=blended, latent=z_obj, alpha=alpha)


def extract_foreground(model, req: RemovalRequest, target: int,
                       tau: float | None = None) -> ForegroundLayer:
    """Extract one object (with its effects) as an RGBA-style layer.

    The object latent is the difference between the removal keeping only the
    target and the removal of everything. Values below tau are zeroed, the
    decode is blended with the kept-object video inside the user mask, and
    alpha comes from the soft effects mask.
    """
    req.validate()
    if not 0 <= target < len(req.masks):
        raise UnknownObject(f"object {target} outside 0..{len(req.masks) - 1}")
    _, z_bg = remove_objects(model, req)
    v_keep, z_keep = remove_objects(model, req.without_object(target))
    return _layer_from_latents(model, req, target, z_keep, v_keep, z_bg, tau)


def extract_layers(model, req: RemovalRequest, tau: float | None = None) -> LayerSet:
    """Full decomposition: clean background plus one layer per object."""
    req.validate()
    v_bg, z_bg = remove_objects(model, req)
    layers = []
    for target in range(len(req.masks)):
        v_keep, z_keep = remove_objects(model, req.without_object(target))
        layers.append(_layer_from_latents(model, req, target, z_keep, v_keep, z_bg, tau))
    return LayerSet(background_video=v_bg, background_latent=z_bg, layers=layers)
