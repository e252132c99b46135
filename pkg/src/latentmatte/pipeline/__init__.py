"""Omnimatte pipelines: removal, layer extraction, composition, baselines."""

from .baselines import baseline_plain, baseline_renoise
from .compose import compose_latent, compose_layers
from .extraction import extract_foreground, extract_layers, inject_pixels
from .removal import (
    build_guidance_plan,
    expand_object_masks,
    injection_sample,
    remove_objects,
    union_mask,
)
from .types import ForegroundLayer, LayerSet, RemovalRequest

__all__ = [
    "RemovalRequest",
    "ForegroundLayer",
    "LayerSet",
    "remove_objects",
    "extract_foreground",
    "extract_layers",
    "inject_pixels",
    "compose_latent",
    "compose_layers",
    "baseline_plain",
    "baseline_renoise",
    "expand_object_masks",
    "union_mask",
    "build_guidance_plan",
    "injection_sample",
]
