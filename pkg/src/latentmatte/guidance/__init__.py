from .apply import (
    apply_spatial_guidance,
    apply_temporal_guidance,
    make_guidance_hook,
    mean_spatial_attention,
    mean_temporal_attention,
)
from .plan import GuidancePlan, make_plan

__all__ = [
    "GuidancePlan",
    "make_plan",
    "mean_temporal_attention",
    "mean_spatial_attention",
    "apply_temporal_guidance",
    "apply_spatial_guidance",
    "make_guidance_hook",
]
