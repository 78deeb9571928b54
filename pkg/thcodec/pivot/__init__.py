from thcodec.pivot.embedding import (
    BackgroundEmbedding,
    background_embedding,
    border_band_mask,
)
from thcodec.pivot.policy import (
    Decision,
    PivotSelector,
    PivotState,
    apply_replacement,
    replay_trace,
    should_replace,
)
from thcodec.pivot.sidecars import MaskDirectory, read_pose_sidecar, write_pose_sidecar

__all__ = [
    "BackgroundEmbedding",
    "Decision",
    "MaskDirectory",
    "PivotSelector",
    "PivotState",
    "apply_replacement",
    "background_embedding",
    "border_band_mask",
    "read_pose_sidecar",
    "replay_trace",
    "should_replace",
    "write_pose_sidecar",
]
