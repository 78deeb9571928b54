from thcodec.motion.backends import (
    KeypointDetector,
    ReferenceWarpBackend,
    WarpBackend,
    reference_reconstruct,
)
from thcodec.motion.flow import DEFAULT_SIGMA, DenseFlow, dense_flow, flow_weights, warp
from thcodec.motion.sources import (
    SidecarKeypointSource,
    read_keypoint_sidecar,
    write_keypoint_sidecar,
)
from thcodec.motion.synthetic import (
    base_keypoints,
    linear_trajectories,
    make_base_frame,
    pose_from_keypoints,
    sinusoidal_trajectories,
    stepped_pose_trace,
    synthesize_sequence,
)

__all__ = [
    "DEFAULT_SIGMA",
    "DenseFlow",
    "KeypointDetector",
    "ReferenceWarpBackend",
    "SidecarKeypointSource",
    "WarpBackend",
    "base_keypoints",
    "dense_flow",
    "flow_weights",
    "linear_trajectories",
    "make_base_frame",
    "pose_from_keypoints",
    "read_keypoint_sidecar",
    "reference_reconstruct",
    "sinusoidal_trajectories",
    "stepped_pose_trace",
    "synthesize_sequence",
    "warp",
]
