import numpy as np
from PIL import Image
import pytest
import yaml

from thcodec.bitstream.packets import PacketKind
from thcodec.bitstream.stream import dump_stream, read_stream_file
from thcodec.channel.simulator import ChannelConfig, ChannelMode, transmit
from thcodec.core.schemas import PivotThresholds
from thcodec.exceptions import ConfigError, FrameIOError, KeypointError, StreamError
from thcodec.interpolation.schedule import FrameTag
from thcodec.metrics.report import evaluate_frames
from thcodec.motion.sources import SidecarKeypointSource
from thcodec.motion.synthetic import base_keypoints
from thcodec.pipeline.decoder import decode_file, decode_packets
from thcodec.pipeline.encoder import encode_frames, write_session
from thcodec.pipeline.frames_io import load_frames, read_frames, read_y4m, write_frames
from thcodec.pipeline.options import SessionManifest
from thcodec.pipeline.synthetic_clip import make_synthetic_clip, write_synthetic_clip
from thcodec.pivot.sidecars import MaskDirectory, read_pose_sidecar


class StillDetector:
    def __init__(self, num_keypoints=10):
        self.kps = base_keypoints(num_keypoints)

    def detect(self, frame):
        return self.kps.with_index(frame.index)


def _still_frames(base_frame, n):
    return [base_frame.with_index(i) for i in range(n)]


def _y4m(width, height, colorspace, frames, value=128):
    if colorspace == "420":
        chroma = ((width + 1) // 2) * ((height + 1) // 2)
    else:
        chroma = width * height
    data = f"YUV4MPEG2 W{width} H{height} F25:1 Ip A1:1 C{colorspace}\n".encode()
    for _ in range(frames):
        data += b"FRAME\n" + bytes([value]) * (width * height + 2 * chroma)
    return data


def test_frame_directory_roundtrip(tmp_path, noise_frame):
    frames = [noise_frame.with_index(i) for i in range(3)]
    paths = write_frames(frames, tmp_path / "frames")
    assert [p.name for p in paths] == ["frame_00000.png", "frame_00001.png", "frame_00002.png"]
    assert read_frames(tmp_path / "frames") == frames
    assert load_frames(tmp_path / "frames") == frames


def test_frame_directory_errors(tmp_path):
    with pytest.raises(FrameIOError):
        read_frames(tmp_path / "missing")
    (tmp_path / "empty").mkdir()
    with pytest.raises(FrameIOError, match="no frames"):
        load_frames(tmp_path / "empty")


@pytest.mark.parametrize("colorspace", ["420", "444"])
def test_y4m_gray(tmp_path, colorspace):
    path = tmp_path / "clip.y4m"
    path.write_bytes(_y4m(16, 18, colorspace, frames=2))
    frames = load_frames(path)
    assert len(frames) == 2 and frames[1].index == 1
    assert frames[0].size == (16, 18)
    assert np.all(frames[0].pixels == 130)


def test_y4m_errors(tmp_path):
    path = tmp_path / "clip.y4m"
    path.write_bytes(_y4m(16, 16, "420", frames=1)[:-10])
    with pytest.raises(FrameIOError, match="truncated"):
        read_y4m(path)
    path.write_bytes(_y4m(16, 16, "422", frames=1))
    with pytest.raises(FrameIOError, match="colorspace"):
        read_y4m(path)
    path.write_bytes(b"RIFF....")
    with pytest.raises(FrameIOError):
        read_y4m(path)


def _write_manifest(tmp_path, **entries):
    path = tmp_path / "manifest.yaml"
    path.write_text(yaml.safe_dump(entries), encoding="utf-8")
    return path


def test_manifest_resolves_relative_paths(tmp_path, noise_frame):
    write_frames([noise_frame], tmp_path / "frames")
    path = _write_manifest(
        tmp_path, input="frames", stream_path="out/s.thc", stream={"interp_frames": 2}
    )
    manifest = SessionManifest.load(path).check()
    assert manifest.input == tmp_path / "frames"
    assert manifest.stream_path == tmp_path / "out" / "s.thc"
    assert manifest.stream.interp_frames == 2
    assert manifest.channel.mode == ChannelMode.RELIABLE


def test_manifest_errors(tmp_path, noise_frame):
    write_frames([noise_frame], tmp_path / "frames")
    bad_yaml = tmp_path / "bad.yaml"
    bad_yaml.write_text("input: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        SessionManifest.load(bad_yaml)
    with pytest.raises(FrameIOError):
        SessionManifest.load(tmp_path / "absent.yaml")
    with pytest.raises(ConfigError):
        SessionManifest.load(
            _write_manifest(tmp_path, input="frames", stream_path="s.thc", channel={"loss_rate": 1.5})
        )
    with pytest.raises(ConfigError, match="interp_frames"):
        SessionManifest.load(
            _write_manifest(tmp_path, input="frames", stream_path="s.thc", stream={"interp_frames": 7})
        ).check()
    with pytest.raises(FrameIOError, match="input"):
        SessionManifest.load(_write_manifest(tmp_path, input="nowhere", stream_path="s.thc")).check()
    with pytest.raises(ConfigError, match="pose sidecar"):
        SessionManifest.load(
            _write_manifest(
                tmp_path, input="frames", stream_path="s.thc", options={"policy_enabled": True}
            )
        ).check()


def test_encode_packet_layout(base_frame, small_cfg, exact_options):
    result = encode_frames(_still_frames(base_frame, 100), small_cfg, StillDetector(), exact_options)
    kinds = [p.kind for p in result.packets]
    assert kinds[:2] == [PacketKind.HANDSHAKE, PacketKind.PIVOT]
    assert kinds.count(PacketKind.KEYPOINTS) == 50
    assert kinds[-1] == PacketKind.END_OF_STREAM and result.packets[-1].frame_index == 100
    assert result.ledger.displayed_frames == 100
    assert result.ledger.keypoint_payload_bits == 50 * 10 * 64
    assert result.ledger.total_bits == 8 * len(dump_stream(result.packets))


def test_single_frame_stream(base_frame, small_cfg, exact_options):
    result = encode_frames(_still_frames(base_frame, 1), small_cfg, StillDetector(), exact_options)
    assert [p.kind for p in result.packets] == [
        PacketKind.HANDSHAKE,
        PacketKind.PIVOT,
        PacketKind.END_OF_STREAM,
    ]
    decoded = decode_packets(result.packets, exact_options, workers=1)
    assert decoded.frames == [base_frame.with_index(0)]


def test_encode_errors(base_frame, noise_frame, small_cfg, exact_options):
    with pytest.raises(FrameIOError):
        encode_frames([], small_cfg, StillDetector(), exact_options)
    with pytest.raises(FrameIOError, match="48"):
        encode_frames([noise_frame], small_cfg, StillDetector(), exact_options)
    with pytest.raises(KeypointError, match="expects 10"):
        encode_frames(_still_frames(base_frame, 3), small_cfg, StillDetector(5), exact_options)
    policy_on = exact_options.model_copy(update={"policy_enabled": True})
    with pytest.raises(ConfigError, match="pose sidecar"):
        encode_frames(_still_frames(base_frame, 3), small_cfg, StillDetector(), policy_on)


def test_linear_clip_decodes_bit_exactly(linear_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(linear_clip.keypoint_map)
    result = encode_frames(linear_clip.frames, small_cfg, detector, exact_options)
    decoded = decode_packets(result.packets, exact_options, workers=2)
    assert len(decoded.frames) == len(linear_clip.frames)
    assert decoded.frames == linear_clip.frames


def test_linear_clip_with_three_interpolated_frames(linear_clip, small_cfg, exact_options):
    cfg = small_cfg.model_copy(update={"interp_frames": 3})
    detector = SidecarKeypointSource(linear_clip.keypoint_map)
    result = encode_frames(linear_clip.frames, cfg, detector, exact_options)
    decoded = decode_packets(result.packets, exact_options, workers=2)
    assert decoded.frames == linear_clip.frames


def test_sinusoidal_clip_quality(sinusoidal_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(sinusoidal_clip.keypoint_map)
    result = encode_frames(sinusoidal_clip.frames, small_cfg, detector, exact_options)
    decoded = decode_packets(result.packets, exact_options, workers=2)
    report = evaluate_frames(sinusoidal_clip.frames, decoded.frames, result.ledger, workers=2)
    assert report.mean_psnr >= 28.0
    # keyed frames come straight from the warp the clip was synthesized with
    assert decoded.frames[1] == sinusoidal_clip.frames[1]


def test_decode_upscales_to_output_size(linear_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(linear_clip.keypoint_map)
    result = encode_frames(linear_clip.frames[:5], small_cfg, detector, exact_options)
    decoded = decode_packets(result.packets, exact_options, workers=1, sr_factor=2, sr_patch=32)
    assert {f.size for f in decoded.frames} == {(128, 128)}
    assert decoded.config.output_size == (128, 128)
    assert [f.size for f in decoded.reconstructed] == [(64, 64)] * 5


def test_reliable_channel_matches_local_decode(sinusoidal_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(sinusoidal_clip.keypoint_map)
    result = encode_frames(sinusoidal_clip.frames, small_cfg, detector, exact_options)
    delivered, report = transmit(result.packets, ChannelConfig())
    assert report.total_bits == result.ledger.total_bits - 32
    local = decode_packets(result.packets, exact_options, workers=1)
    remote = decode_packets(delivered, exact_options, workers=1)
    assert remote.frames == local.frames


def test_lossy_channel_still_decodes_every_frame(sinusoidal_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(sinusoidal_clip.keypoint_map)
    result = encode_frames(sinusoidal_clip.frames, small_cfg, detector, exact_options)
    cfg = ChannelConfig(mode=ChannelMode.LOSSY, loss_rate=0.3, reorder_rate=0.2, seed=5)
    delivered, report = transmit(result.packets, cfg)
    decoded = decode_packets(delivered, exact_options, workers=2)
    assert len(decoded.frames) == len(sinusoidal_clip.frames)
    assert decoded.missing_keyed == sorted(report.dropped_indices)
    decoded.schedule.validate()


def test_decode_requires_structure(base_frame, small_cfg, exact_options):
    packets = encode_frames(
        _still_frames(base_frame, 5), small_cfg, StillDetector(), exact_options
    ).packets
    with pytest.raises(StreamError, match="end-of-stream"):
        decode_packets(packets[:-1], exact_options)
    with pytest.raises(StreamError, match="initial pivot"):
        decode_packets([packets[0]] + packets[2:], exact_options)
    with pytest.raises(StreamError, match="handshake"):
        decode_packets(packets[1:], exact_options)


def test_session_files(tmp_path, linear_clip, small_cfg, exact_options):
    detector = SidecarKeypointSource(linear_clip.keypoint_map)
    result = encode_frames(linear_clip.frames, small_cfg, detector, exact_options)
    stream_path = tmp_path / "session.thc"
    write_session(result, stream_path)
    assert result.ledger.total_bits == 8 * stream_path.stat().st_size
    assert read_stream_file(stream_path) == result.packets

    decoded = decode_file(stream_path, tmp_path / "decoded", exact_options, workers=1)
    assert read_frames(tmp_path / "decoded") == decoded.frames

    stream_path.write_bytes(stream_path.read_bytes()[:-7])
    with pytest.raises(StreamError):
        decode_file(stream_path, tmp_path / "again", exact_options)


def test_pivot_policy_replaces_on_pose_steps(small_cfg, exact_options):
    clip = make_synthetic_clip(84, 64, 64, pose_trace="stepped", seed=4)
    cfg = small_cfg.model_copy(update={"pivot_policy": PivotThresholds.uniform(15.0, 1.5)})
    options = exact_options.model_copy(update={"policy_enabled": True})
    detector = SidecarKeypointSource(clip.keypoint_map)
    result = encode_frames(clip.frames, cfg, detector, options, clip.pose_map)
    assert result.replacement_indices == [13, 25, 37, 49, 61, 73]
    assert result.ledger.replacement_indices == result.replacement_indices
    assert result.ledger.pivot_packets == 7
    assert result.schedule.indices(FrameTag.PIVOT_DIRECT) == [0] + result.replacement_indices

    decoded = decode_packets(result.packets, options, workers=2)
    assert len(decoded.frames) == 84
    for index in result.replacement_indices:
        assert decoded.frames[index] == clip.frames[index]


def test_policy_reads_mask_directory(tmp_path, small_cfg, exact_options):
    clip = make_synthetic_clip(10, 64, 64, pose_trace="stepped", seed=4)
    face = np.zeros((64, 64), dtype=np.uint8)
    face[16:48, 16:48] = 255
    masks = tmp_path / "masks"
    masks.mkdir()
    for i in range(10):
        Image.fromarray(face).save(masks / f"mask_{i:03d}.png")
    cfg = small_cfg.model_copy(update={"pivot_policy": PivotThresholds.uniform(15.0, 1.5)})
    options = exact_options.model_copy(update={"policy_enabled": True})
    detector = SidecarKeypointSource(clip.keypoint_map)
    result = encode_frames(clip.frames, cfg, detector, options, clip.pose_map, MaskDirectory(masks))
    assert result.replacement_indices == []

    # frame 4 is interpolated with m=1, so the policy never looks at it
    (masks / "mask_004.png").unlink()
    result = encode_frames(clip.frames, cfg, detector, options, clip.pose_map, MaskDirectory(masks))
    assert result.replacement_indices == []

    (masks / "mask_005.png").unlink()
    with pytest.raises(FrameIOError, match="no mask for frame 5"):
        encode_frames(clip.frames, cfg, detector, options, clip.pose_map, MaskDirectory(masks))


def test_synthetic_clip_files(tmp_path):
    clip = make_synthetic_clip(5, 32, 32, num_keypoints=4, pose_trace="stepped", seed=9)
    manifest_path = write_synthetic_clip(clip, tmp_path, {"sr_factor": 1})
    manifest = SessionManifest.load(manifest_path).check()
    assert manifest.stream.num_keypoints == 4 and manifest.stream.sr_factor == 1
    assert read_frames(manifest.input) == clip.frames
    source = SidecarKeypointSource.from_file(manifest.keypoints, 4)
    assert source.detect(clip.frames[3]) == clip.keypoints[3]
    assert read_pose_sidecar(manifest.pose) == clip.pose_map
