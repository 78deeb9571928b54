import numpy as np
import pytest
from scipy import ndimage

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.exceptions import FlowError, KeypointError
from thcodec.metrics.quality import psnr
from thcodec.motion.backends import KeypointDetector, ReferenceWarpBackend, WarpBackend
from thcodec.motion.flow import DenseFlow, dense_flow, flow_weights, normalized_grid, warp
from thcodec.motion.sources import (
    SidecarKeypointSource,
    read_keypoint_sidecar,
    write_keypoint_sidecar,
)
from thcodec.motion.synthetic import (
    base_keypoints,
    linear_trajectories,
    sinusoidal_trajectories,
    stepped_pose_trace,
    synthesize_sequence,
)


def _smooth_frame(size=64, seed=5):
    rng = np.random.default_rng(seed)
    field = ndimage.gaussian_filter(rng.normal(size=(size, size, 3)), sigma=(4, 4, 0))
    field = (field - field.min()) / (field.max() - field.min())
    return Frame.from_float(30 + 190 * field)


def test_identical_keypoints_give_zero_flow():
    kps = base_keypoints(10)
    flow = dense_flow(kps, kps, 0.1, 40, 32)
    assert np.array_equal(flow.vectors, np.zeros((32, 40, 2)))


def test_uniform_translation_gives_uniform_flow():
    driving = base_keypoints(10)
    source = KeyPointSet(0, driving.points.astype(np.float64) + [0.1, 0.0])
    flow = dense_flow(source, driving, 0.1, 48, 48)
    assert np.abs(flow.vectors[..., 0] - 0.1).max() < 1e-6
    assert np.abs(flow.vectors[..., 1]).max() < 1e-6


def test_opposite_displacements_cancel_at_equidistant_point():
    driving = KeyPointSet.from_pairs(0, [(-0.5, 0.0), (0.5, 0.0)])
    source = KeyPointSet.from_pairs(0, [(-0.5, 0.5), (0.5, -0.5)])
    flow = dense_flow(source, driving, 0.1, 65, 65)
    # pixel 32 is normalized 0 on a 65-pixel axis
    assert np.allclose(flow.vectors[32, 32], 0.0, atol=1e-12)
    assert flow.vectors[32, 10, 1] > 0 and flow.vectors[32, 54, 1] < 0


def test_weights_are_normalized_and_match_brute_force():
    kps = base_keypoints(10)
    weights = flow_weights(kps, 0.1, 33, 21)
    assert np.abs(weights.sum(axis=2) - 1.0).max() < 1e-6
    xs, ys = normalized_grid(33, 21)
    pts = kps.points.astype(np.float64)
    for row, col in [(0, 0), (10, 16), (20, 32), (5, 7)]:
        raw = np.exp(-((xs[col] - pts[:, 0]) ** 2 + (ys[row] - pts[:, 1]) ** 2) / (2 * 0.01))
        assert np.allclose(weights[row, col], raw / raw.sum(), atol=1e-9)


def test_bad_sigma_and_count_mismatch():
    kps = base_keypoints(10)
    with pytest.raises(FlowError):
        flow_weights(kps, 0.0, 16, 16)
    with pytest.raises(FlowError, match="keypoint count mismatch"):
        dense_flow(kps, base_keypoints(5), 0.1, 16, 16)


def test_zero_flow_warp_is_identity(base_frame):
    out = warp(base_frame, DenseFlow.zeros(base_frame.width, base_frame.height))
    assert out == base_frame


def test_one_pixel_shift_is_exact():
    gradient = np.tile(np.arange(0, 128, 4, dtype=np.uint8)[None, :, None], (20, 1, 3))
    pivot = Frame(gradient)
    pixel_flow = np.zeros((20, 32, 2))
    pixel_flow[..., 0] = 1.0
    out = warp(pivot, DenseFlow.from_pixels(pixel_flow))
    assert np.array_equal(out.pixels[:, :-1], pivot.pixels[:, 1:])


def test_forward_backward_warp_is_near_identity():
    pivot = _smooth_frame()
    rows, cols = np.mgrid[0:64, 0:64]
    pixel_flow = np.stack(
        [np.sin(2 * np.pi * rows / 64), 0.8 * np.cos(2 * np.pi * cols / 64)], axis=-1
    )
    flow = DenseFlow.from_pixels(pixel_flow)
    back = warp(warp(pivot, flow), -flow)
    inner = (slice(4, -4), slice(4, -4))
    assert psnr(Frame(back.pixels[inner]), Frame(pivot.pixels[inner])) >= 30.0


def test_flow_size_mismatch():
    with pytest.raises(FlowError, match="flow/frame size mismatch"):
        warp(_smooth_frame(), DenseFlow.zeros(32, 32))


def test_reference_backend_contract(base_frame):
    backend = ReferenceWarpBackend(0.1)
    assert isinstance(backend, WarpBackend)
    kps = base_keypoints(10)
    assert backend.reconstruct(base_frame, kps, kps) == base_frame
    with pytest.raises(FlowError, match="keypoint count mismatch"):
        backend.reconstruct(base_frame, kps, base_keypoints(4))


def test_constant_trajectories_reproduce_base(base_frame):
    kps = base_keypoints(10)
    frames = synthesize_sequence(base_frame, [kps.with_index(i) for i in range(4)])
    assert all(np.array_equal(f.pixels, base_frame.pixels) for f in frames)
    assert [f.index for f in frames] == [0, 1, 2, 3]


def test_linear_trajectories_are_exact_and_bounded():
    trajectories = linear_trajectories(40, seed=4)
    pts = np.stack([k.points.astype(np.float64) for k in trajectories])
    assert np.abs(pts).max() <= 1.0
    # constant velocity: every interior point is the exact midpoint of its neighbours
    assert np.array_equal(pts[1:-1], 0.5 * (pts[:-2] + pts[2:]))


def test_sinusoidal_trajectories_start_at_base():
    base = base_keypoints(10)
    trajectories = sinusoidal_trajectories(10, base, seed=1)
    assert trajectories[0] == base
    assert not all(t.with_index(0) == base for t in trajectories[1:])


def test_keypoint_sidecar_roundtrip_is_bit_exact(tmp_path):
    trajectories = sinusoidal_trajectories(6, seed=3)
    path = write_keypoint_sidecar(tmp_path / "kp.txt", trajectories)
    loaded = read_keypoint_sidecar(path, 10)
    assert [loaded[i] for i in range(6)] == trajectories
    with pytest.raises(KeypointError, match="columns"):
        read_keypoint_sidecar(path, 4)


def test_empty_keypoint_sidecar_is_a_keypoint_error(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    with pytest.raises(KeypointError, match="unreadable"):
        read_keypoint_sidecar(empty, 10)
    empty.write_text("# header only\n")
    with pytest.raises(KeypointError, match="unreadable"):
        read_keypoint_sidecar(empty, 10)


def test_sidecar_source_is_a_detector(base_frame):
    source = SidecarKeypointSource({0: base_keypoints(10)})
    assert isinstance(source, KeypointDetector)
    assert source.detect(base_frame) == base_keypoints(10)
    with pytest.raises(KeypointError, match="no keypoints for frame 3"):
        source.detect(base_frame.with_index(3))


def test_stepped_pose_trace_levels():
    poses = stepped_pose_trace(90, levels=(20.0, 35.0), segment=10)
    assert [p.yaw for p in poses[::10]] == [0.0, 20.0, 0.0, 35.0, 0.0, 0.0, 0.0, 0.0, 0.0]
