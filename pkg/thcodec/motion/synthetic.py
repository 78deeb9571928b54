"""Synthetic talking-head scenes whose true motion is exactly the reference motion model.

Frames are produced by warping a smooth base image with keypoint trajectories, so a
receiver that gets the same keypoints reproduces them through the same float path.
"""
import math
from typing import List, Optional

import numpy as np
from scipy import ndimage

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.schemas import PoseAngles
from thcodec.exceptions import FlowError
from thcodec.motion.backends import reference_reconstruct
from thcodec.motion.flow import DEFAULT_SIGMA, normalized_grid

# Dyadic grid steps keep trajectories exact in float32 and keep midpoints exact.
POSITION_STEP = 1.0 / 64
VELOCITY_STEP = 1.0 / 1024

# eyes, brows, nose, mouth corners, chin, cheeks
_FACE_LAYOUT = [
    (-0.25, -0.2), (0.25, -0.2),
    (-0.25, -0.375), (0.25, -0.375),
    (0.0, 0.0),
    (-0.1875, 0.25), (0.1875, 0.25),
    (0.0, 0.4375),
    (-0.4375, 0.0625), (0.4375, 0.0625),
]


def base_keypoints(num_keypoints: int = 10, seed: int = 0) -> KeyPointSet:
    layout = list(_FACE_LAYOUT[:num_keypoints])
    rng = np.random.default_rng(seed)
    while len(layout) < num_keypoints:
        layout.append(tuple(rng.integers(-32, 33, size=2) * POSITION_STEP))
    return KeyPointSet.from_pairs(0, layout)


def make_base_frame(width: int = 256, height: int = 256, seed: int = 0) -> Frame:
    """Smooth head-and-shoulders-like image: gradient background, bright face ellipse,
    dark features at the keypoint layout, low-frequency texture."""
    rng = np.random.default_rng(seed)
    xs, ys = normalized_grid(width, height)
    x, y = np.meshgrid(xs, ys)
    tint = rng.uniform(-20, 20, size=3)

    background = np.stack(
        [90 + 50 * x + 20 * y, 110 + 30 * y, 140 - 40 * x + 10 * y], axis=-1
    ) + tint
    texture = 18 * np.sin(1.5 * math.pi * x + rng.uniform(0, math.pi)) * np.cos(
        math.pi * y
    )
    face = np.exp(-((x / 0.45) ** 2 + ((y - 0.05) / 0.6) ** 2) ** 2)
    image = background + texture[..., None] + face[..., None] * np.array([95.0, 70.0, 45.0])

    for fx, fy in _FACE_LAYOUT:
        spot = np.exp(-((x - fx) ** 2 + (y - fy) ** 2) / (2 * 0.05**2))
        image -= spot[..., None] * 60.0

    image = ndimage.gaussian_filter(image, sigma=(1.0, 1.0, 0))
    return Frame.from_float(image, 0)


def linear_trajectories(
    n_frames: int,
    base: Optional[KeyPointSet] = None,
    seed: int = 0,
    max_drift: float = 0.25,
) -> List[KeyPointSet]:
    """Constant-velocity keypoint motion on a dyadic grid (exact midpoints)."""
    if n_frames < 1:
        raise FlowError("empty sequence")
    base = base or base_keypoints()
    rng = np.random.default_rng(seed)
    q = max(1, int(max_drift / VELOCITY_STEP) // max(n_frames - 1, 1))
    common = rng.integers(-q, q + 1, size=2)
    jitter = rng.integers(-1, 2, size=(len(base), 2))
    velocity = np.clip(common + jitter, -q, q) * VELOCITY_STEP
    origin = base.points.astype(np.float64)
    return [KeyPointSet.clamped(t, origin + t * velocity) for t in range(n_frames)]


def sinusoidal_trajectories(
    n_frames: int,
    base: Optional[KeyPointSet] = None,
    seed: int = 0,
    amplitude: float = 0.04,
    period: float = 20.0,
) -> List[KeyPointSet]:
    """Head sway plus per-keypoint wobble; nonlinear, so interpolation is approximate."""
    if n_frames < 1:
        raise FlowError("empty sequence")
    base = base or base_keypoints()
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0, 2 * math.pi, size=(len(base), 2))
    origin = base.points.astype(np.float64)
    sets = [base.with_index(0)]
    for t in range(1, n_frames):
        sway = amplitude * math.sin(2 * math.pi * t / (1.7 * period))
        wobble = 0.5 * amplitude * (np.sin(2 * math.pi * t / period + phases) - np.sin(phases))
        sets.append(KeyPointSet.clamped(t, origin + sway + wobble))
    return sets


def synthesize_sequence(
    base: Frame, trajectories: List[KeyPointSet], sigma: float = DEFAULT_SIGMA
) -> List[Frame]:
    """Frame t is the base warped from trajectories[0] to trajectories[t]."""
    if not trajectories:
        raise FlowError("empty sequence")
    source = trajectories[0]
    frames = [base.with_index(0)]
    for t, driving in enumerate(trajectories[1:], start=1):
        frames.append(reference_reconstruct(base, source, driving.with_index(t), sigma))
    return frames


def pose_from_keypoints(reference: KeyPointSet, current: KeyPointSet) -> PoseAngles:
    """Crude pose proxy for synthetic clips: mean shift maps to yaw/pitch, eye-line tilt to roll."""
    ref = reference.points.astype(np.float64)
    cur = current.points.astype(np.float64)
    shift = (cur - ref).mean(axis=0)
    roll = 0.0
    if len(ref) >= 2:
        ref_angle = math.atan2(ref[1, 1] - ref[0, 1], ref[1, 0] - ref[0, 0])
        cur_angle = math.atan2(cur[1, 1] - cur[0, 1], cur[1, 0] - cur[0, 0])
        roll = math.degrees(cur_angle - ref_angle)
    clamp = lambda v: float(np.clip(v, -90.0, 90.0))  # noqa: E731
    return PoseAngles(yaw=clamp(shift[0] * 90.0), roll=clamp(roll), pitch=clamp(shift[1] * 90.0))


def stepped_pose_trace(
    n_frames: int, levels=(20.0, 35.0, 50.0), segment: int = 12
) -> List[PoseAngles]:
    """Yaw alternates between 0 and each level for ``segment`` frames at a time.

    A higher threshold only ever drops steps a lower one fires on, which makes the trace
    useful for sweeping replacement thresholds.
    """
    if segment < 1:
        raise FlowError("segment must be at least one frame")
    yaws = [0.0]
    for level in levels:
        yaws.extend([float(level), 0.0])
    return [PoseAngles(yaw=yaws[min(t // segment, len(yaws) - 1)]) for t in range(n_frames)]
