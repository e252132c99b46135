"""Guided object removal: tracked correspondences steer the inpainting sampler."""

import logging

import numpy as np

from ..errors import DegenerateMask, TrackingFailed
from ..guidance import GuidancePlan, make_guidance_hook, make_plan
from ..matting import extract_effect_mask, latent_mask_encode
from ..numerics import SeededRng, add_noise, snap_to_grid
from ..scene import oracle_tracks
from ..tracking import (
    filter_background,
    sample_object_points,
    to_token_correspondences,
    track_block_match,
)
from .types import RemovalRequest

log = logging.getLogger(__name__)


def expand_object_masks(model, req: RemovalRequest) -> list[np.ndarray]:
    """Grow each object mask to cover its attention-derived effects.

    The effect mask is unioned with the input mask, so enabling expansion
    never shrinks the region to inpaint. A degenerate (constant-attention)
    mask falls back to the object mask alone.
    """
    if not req.use_effect_mask:
        return [np.asarray(m, dtype=bool) for m in req.masks]
    tf = model.config.temporal_factor
    sp = model.config.spatial_factor
    expanded = []
    for k, m in enumerate(req.masks):
        m = np.asarray(m, dtype=bool)
        try:
            effect = extract_effect_mask(model, req.video, m,
                                         rng=SeededRng(req.seed).child("effect"))
            expanded.append(m | effect.to_pixel(tf, sp))
        except DegenerateMask:
            log.info("effect mask for object %d degenerate; using object mask", k)
            expanded.append(m)
    return expanded


def union_mask(masks: list[np.ndarray]) -> np.ndarray:
    out = np.zeros(masks[0].shape, dtype=bool)
    for m in masks:
        out |= np.asarray(m, dtype=bool)
    return out


def build_guidance_plan(model, req: RemovalRequest, pixel_mask: np.ndarray,
                        latent_mask: np.ndarray) -> GuidancePlan:
    """Track points sampled on the inpainting region and compile the plan."""
    rng = SeededRng(req.seed).child("points")
    points = sample_object_points(pixel_mask, req.density, rng)
    if req.tracker == "oracle":
        tracks = oracle_tracks(req.scene, points)
    else:
        tracks = track_block_match(req.video, points)
    tracks = filter_background(tracks, pixel_mask)
    corrs = to_token_correspondences(
        tracks,
        latent_mask,
        temporal_factor=model.config.temporal_factor,
        spatial_factor=model.config.spatial_factor,
    )
    f, h, w = latent_mask.shape
    return make_plan(
        corrs,
        latent_frames=f,
        tokens_per_frame=h * w,
        use_temporal=req.use_temporal,
        use_spatial=req.use_spatial,
    )


def injection_sample(model, z0: np.ndarray, latent_mask: np.ndarray,
                     steps: int, seed: int, hooks=()) -> np.ndarray:
    """Sample from noise while re-injecting the known region at every step.

    After each update the cells outside the latent mask are overwritten with
    the original latent noised to the step's level, so at the final boundary
    (sigma 0) they equal the encoded original bit for bit.
    """
    sched = model.schedule(steps)
    rng = SeededRng(seed).child("sampler")
    region = latent_mask[..., None]
    # masked cells start from pure noise: the clean component is zeroed so no
    # object content leaks into the region being resynthesized
    hidden = np.where(region, np.float32(0.0), z0)
    start, _ = add_noise(hidden, 0, sched, rng)

    def reinject(t, z):
        noised, _ = add_noise(z0, t + 1, sched, rng)
        return np.where(region, z, noised)

    z = model.sample(start, sched, hooks=hooks, per_step_callback=reinject)
    return snap_to_grid(z)


def remove_objects(model, req: RemovalRequest, enable_guidance: bool = True):
    """Remove the requested objects and their effects; returns (V_bg, Z_bg).

    With no masks this is the encode/decode round trip. Guidance hooks steer
    every attention layer toward tracked background content; when neither
    guidance family finds a usable correspondence the removal fails rather
    than silently degrading to the unguided baseline.
    """
    req.validate()
    model.require_vae()
    z0 = model.encode(req.video)
    if not req.masks:
        return model.decode(z0), z0
    model.require_denoiser()

    expanded = expand_object_masks(model, req)
    pixel_mask = union_mask(expanded)
    latent_mask = latent_mask_encode(model, pixel_mask)

    hooks = ()
    if enable_guidance and (req.use_temporal or req.use_spatial):
        plan = build_guidance_plan(model, req, pixel_mask, latent_mask)
        if plan.is_empty:
            raise TrackingFailed(
                "no query token has 2 cross-frame matches or 2 surround tokens"
            )
        if req.use_temporal and not plan.temporal_queries:
            log.info("no cross-frame correspondences; spatial guidance only")
        hooks = (make_guidance_hook(plan),)

    z_bg = injection_sample(model, z0, latent_mask, req.steps, req.seed, hooks)
    return model.decode(z_bg), z_bg
