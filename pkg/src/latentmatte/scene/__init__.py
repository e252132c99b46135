"""Synthetic scenes with exact ground truth: backgrounds, sprites, effects, tracks."""

from .io import (
    load_mask_video,
    load_scene_spec,
    load_video,
    save_mask_video,
    save_scene_spec,
    save_soft_mask_video,
    save_video,
)
from .suite import (
    load_bundle,
    load_suite,
    make_default_suite,
    make_holdout_suite,
    make_training_suite,
    save_bundle,
    save_suite,
    suite_scene_dirs,
)
from .synth import oracle_tracks, synthesize
from .types import Reflection, SceneBundle, SceneSpec, Shadow, Sprite

__all__ = [
    "Reflection",
    "SceneBundle",
    "SceneSpec",
    "Shadow",
    "Sprite",
    "load_bundle",
    "load_mask_video",
    "load_scene_spec",
    "load_suite",
    "load_video",
    "make_default_suite",
    "make_holdout_suite",
    "make_training_suite",
    "oracle_tracks",
    "save_bundle",
    "save_mask_video",
    "save_scene_spec",
    "save_soft_mask_video",
    "save_suite",
    "save_video",
    "suite_scene_dirs",
    "synthesize",
]
