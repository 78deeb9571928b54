"""Synthetic clips with known keypoints and poses, written in the layout the CLI reads."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import yaml

from thcodec.config import LOGGER
from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.schemas import PoseAngles
from thcodec.exceptions import ConfigError
from thcodec.motion.sources import write_keypoint_sidecar
from thcodec.motion.flow import DEFAULT_SIGMA
from thcodec.motion.synthetic import (
    base_keypoints,
    linear_trajectories,
    make_base_frame,
    pose_from_keypoints,
    sinusoidal_trajectories,
    stepped_pose_trace,
    synthesize_sequence,
)
from thcodec.pipeline.frames_io import write_frames
from thcodec.pivot.sidecars import write_pose_sidecar

TRAJECTORIES = ("linear", "sinusoidal")
POSE_TRACES = ("keypoints", "stepped")


@dataclass
class SyntheticClip:
    frames: List[Frame]
    keypoints: List[KeyPointSet]
    poses: List[PoseAngles]

    @property
    def keypoint_map(self) -> Dict[int, KeyPointSet]:
        return {kps.frame_index: kps for kps in self.keypoints}

    @property
    def pose_map(self) -> Dict[int, PoseAngles]:
        return dict(enumerate(self.poses))


def make_synthetic_clip(
    n_frames: int,
    width: int = 256,
    height: int = 256,
    num_keypoints: int = 10,
    trajectory: str = "linear",
    pose_trace: str = "keypoints",
    seed: int = 0,
    sigma: float = DEFAULT_SIGMA,
) -> SyntheticClip:
    if trajectory not in TRAJECTORIES:
        raise ConfigError(f"unknown trajectory '{trajectory}', expected one of {TRAJECTORIES}")
    if pose_trace not in POSE_TRACES:
        raise ConfigError(f"unknown pose trace '{pose_trace}', expected one of {POSE_TRACES}")
    base_kps = base_keypoints(num_keypoints, seed)
    make = linear_trajectories if trajectory == "linear" else sinusoidal_trajectories
    keypoints = make(n_frames, base_kps, seed)
    frames = synthesize_sequence(make_base_frame(width, height, seed), keypoints, sigma)
    if pose_trace == "stepped":
        poses = stepped_pose_trace(n_frames)
    else:
        poses = [pose_from_keypoints(keypoints[0], kps) for kps in keypoints]
    return SyntheticClip(frames, keypoints, poses)


def write_synthetic_clip(
    clip: SyntheticClip,
    directory: Union[str, Path],
    stream_overrides: Optional[dict] = None,
) -> Path:
    """frames/, keypoints.txt, poses.txt and a manifest.yaml pointing at them."""
    directory = Path(directory)
    write_frames(clip.frames, directory / "frames")
    write_keypoint_sidecar(directory / "keypoints.txt", clip.keypoints)
    write_pose_sidecar(directory / "poses.txt", enumerate(clip.poses))
    width, height = clip.frames[0].size
    manifest = {
        "input": "frames",
        "stream_path": "session.thc",
        "output": "decoded",
        "keypoints": "keypoints.txt",
        "pose": "poses.txt",
        "report": "report.json",
        "stream": {
            "width": width,
            "height": height,
            "num_keypoints": len(clip.keypoints[0]),
            **(stream_overrides or {}),
        },
    }
    path = directory / "manifest.yaml"
    path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    LOGGER.info(f"Synthetic clip of {len(clip.frames)} frames written to {directory}")
    return path
