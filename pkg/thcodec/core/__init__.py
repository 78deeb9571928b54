from thcodec.core.frames import Frame, KeyPointSet, to_normalized, to_pixels
from thcodec.core.schemas import (
    PivotThresholds,
    PoseAngles,
    StreamConfig,
    require_valid,
    validate_config,
)

__all__ = [
    "Frame",
    "KeyPointSet",
    "PivotThresholds",
    "PoseAngles",
    "StreamConfig",
    "require_valid",
    "to_normalized",
    "to_pixels",
    "validate_config",
]
