from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pydantic
import pytest

from thcodec.config_loader import PROJECT_ROOT, get_config, resolve_path
from thcodec.core.frames import Frame, KeyPointSet, to_normalized, to_pixels
from thcodec.core.parallel import parallel_map
from thcodec.core.schemas import (
    PivotThresholds,
    PoseAngles,
    StreamConfig,
    require_valid,
    validate_config,
)
from thcodec.exceptions import ConfigError, FrameIOError, KeypointError


def test_default_config_is_valid():
    """256x256, 10 keypoints, m=1, 2x SR, 64px patches passes validation"""
    cfg = StreamConfig()
    assert validate_config(cfg) == []
    assert cfg.output_size == (512, 512)


def test_validate_config_reports_every_violation():
    cfg = StreamConfig(width=8, interp_frames=4)
    errors = validate_config(cfg)
    assert "width below minimum" in errors
    assert "interp_frames out of range" in errors
    assert len(errors) == 2


def test_validate_config_thresholds_and_sr():
    cfg = StreamConfig(sr_factor=3, pivot_policy=PivotThresholds.uniform(0.0, 0.05))
    errors = validate_config(cfg)
    assert "sr_factor out of range" in errors
    assert "gamma_yaw must be strictly positive" in errors


def test_require_valid_raises_config_error():
    with pytest.raises(ConfigError, match="num_keypoints out of range"):
        require_valid(StreamConfig(num_keypoints=0))


def test_frame_rejects_small_and_is_read_only():
    with pytest.raises(FrameIOError, match="width below minimum"):
        Frame(np.zeros((32, 8, 3), dtype=np.uint8))
    with pytest.raises(FrameIOError, match="height below minimum"):
        Frame(np.zeros((15, 32, 3), dtype=np.uint8))
    frame = Frame(np.zeros((16, 16, 3), dtype=np.uint8), 4)
    assert not frame.pixels.flags.writeable
    assert frame.size == (16, 16)


def test_frame_owns_its_pixels():
    """Mutating the source array after construction does not change the frame"""
    source = np.zeros((16, 16, 3), dtype=np.uint8)
    frame = Frame(source)
    source[0, 0, 0] = 9
    assert frame.pixels[0, 0, 0] == 0


def test_luma_uses_bt601_weights():
    pixels = np.zeros((16, 16, 3), dtype=np.uint8)
    pixels[..., 0] = 100
    assert np.allclose(Frame(pixels).luma(), 29.9)


def test_keypoint_set_validation():
    with pytest.raises(KeypointError, match="empty keypoint set"):
        KeyPointSet(0, np.zeros((0, 2)))
    with pytest.raises(KeypointError, match="coordinate out of range"):
        KeyPointSet.from_pairs(1, [(0.0, 1.5)])
    with pytest.raises(KeypointError):
        KeyPointSet.from_pairs(1, [(np.nan, 0.0)])


def test_clamped_keypoints_stay_on_the_border():
    kps = KeyPointSet.clamped(2, np.array([[1.3, -0.2], [-4.0, 0.9]]))
    assert kps.points.tolist() == [[1.0, np.float32(-0.2)], [-1.0, np.float32(0.9)]]


def test_lerp_midpoint_and_count_mismatch():
    a = KeyPointSet.from_pairs(1, [(0.0, 0.0), (0.5, -0.5)])
    b = KeyPointSet.from_pairs(3, [(0.5, 0.25), (0.0, 0.0)])
    mid = a.lerp(b, 0.5, 2)
    assert mid == KeyPointSet.from_pairs(2, [(0.25, 0.125), (0.25, -0.25)])
    with pytest.raises(KeypointError, match="keypoint count mismatch"):
        a.lerp(KeyPointSet.from_pairs(3, [(0.0, 0.0)]), 0.5, 2)


def test_pixel_convention_hits_outer_pixel_centres():
    assert to_pixels(-1.0, 256) == 0.0
    assert to_pixels(1.0, 256) == 255.0
    assert to_pixels(0.0, 257) == 128.0


@settings(max_examples=200)
@given(st.integers(min_value=16, max_value=4096), st.floats(min_value=-1.0, max_value=1.0))
def test_coordinate_conversion_roundtrip(size, coord):
    """to_normalized(to_pixels(c)) recovers c within half a pixel"""
    pixel = to_pixels(coord, size)
    assert 0.0 <= pixel <= size - 1
    assert abs(to_pixels(to_normalized(pixel, size), size) - pixel) < 0.5


def test_pose_angles_are_bounded():
    with pytest.raises(pydantic.ValidationError):
        PoseAngles(yaw=120.0)
    assert PoseAngles(yaw=-90.0).yaw == -90.0


def test_parallel_map_preserves_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, workers=4) == [x * x for x in items]
    assert parallel_map(lambda x: x + 1, items, workers=1) == [x + 1 for x in items]


def test_resolve_path(tmp_path):
    assert resolve_path(None, tmp_path) == tmp_path
    assert resolve_path("", None) is None
    assert resolve_path("data/streams") == PROJECT_ROOT / "data" / "streams"
    assert resolve_path("frames", root=tmp_path) == tmp_path / "frames"
    assert resolve_path(tmp_path / "abs", root=PROJECT_ROOT) == tmp_path / "abs"


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        get_config(path=tmp_path / "missing.yaml")
    listed = tmp_path / "listed.yaml"
    listed.write_text("- stream\n- sr\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        get_config("stream", path=listed)
    assert get_config("stream")["interp_frames"] in range(4)
