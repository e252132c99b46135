from .blockmatch import track_block_match
from .filters import filter_background
from .points import sample_object_points
from .tokens import TokenCorrespondence, pixel_to_token, to_token_correspondences
from .types import TrackSet

__all__ = [
    "TrackSet",
    "TokenCorrespondence",
    "sample_object_points",
    "track_block_match",
    "filter_background",
    "to_token_correspondences",
    "pixel_to_token",
]
