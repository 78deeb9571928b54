from dataclasses import dataclass
from enum import IntEnum
import io
import struct
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.schemas import PivotThresholds, StreamConfig, validate_config
from thcodec.exceptions import KeypointError, StreamError

KEYPOINT_BYTES = 8
JACOBIAN_KEYPOINT_BYTES = 24
HANDSHAKE_STRUCT = struct.Struct("<IIBBBHH")
_POINT = struct.Struct("<2f")
_POINT_WITH_JACOBIAN = struct.Struct("<6f")
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class PacketKind(IntEnum):
    HANDSHAKE = 0x00
    PIVOT = 0x01
    KEYPOINTS = 0x02
    END_OF_STREAM = 0x03


@dataclass(frozen=True)
class Packet:
    """One wire unit. ``count`` is the keypoint-count header byte of KeyPoints packets."""

    kind: PacketKind
    frame_index: int
    payload: bytes = b""
    count: int = 0

    def __post_init__(self):
        if not 0 <= self.frame_index <= 0xFFFFFFFF:
            raise StreamError(f"frame index {self.frame_index} does not fit 32 bits")
        if not 0 <= self.count <= 0xFF:
            raise StreamError(f"keypoint count {self.count} does not fit one byte")

    @property
    def payload_bits(self) -> int:
        return len(self.payload) * 8


def keypoint_payload_size(num_keypoints: int, with_jacobians: bool = False) -> int:
    per_point = JACOBIAN_KEYPOINT_BYTES if with_jacobians else KEYPOINT_BYTES
    return num_keypoints * per_point


def _pack_points(kps: KeyPointSet) -> bytes:
    # float32 little-endian, x then y
    return kps.points.astype("<f4").tobytes()


def _unpack_points(frame_index: int, data: bytes, count: int) -> KeyPointSet:
    if count == 0:
        raise KeypointError("empty keypoint set")
    if len(data) != count * KEYPOINT_BYTES:
        raise KeypointError(
            f"truncated keypoint payload: frame {frame_index} has {len(data)} bytes "
            f"for {count} keypoints"
        )
    points = np.frombuffer(data, dtype="<f4").reshape(count, 2).astype(np.float32)
    if not np.all(np.isfinite(points)) or np.any(np.abs(points) > 1.0):
        raise KeypointError(f"coordinate out of range in frame {frame_index}")
    return KeyPointSet(frame_index, points)


def encode_keypoints(kps: KeyPointSet, ledger=None) -> Packet:
    if len(kps) == 0 or len(kps) > 0xFF:
        raise KeypointError(f"cannot encode {len(kps)} keypoints")
    packet = Packet(PacketKind.KEYPOINTS, kps.frame_index, _pack_points(kps), len(kps))
    if ledger is not None:
        ledger.credit(packet)
    return packet


def decode_keypoints(pkt: Packet) -> KeyPointSet:
    if pkt.kind != PacketKind.KEYPOINTS:
        raise StreamError(f"expected a keypoint packet, got {pkt.kind.name}")
    return _unpack_points(pkt.frame_index, pkt.payload, pkt.count)


def encode_keypoints_with_jacobians(kps: KeyPointSet, jacobians: np.ndarray) -> bytes:
    """Comparison encoder: x, y and a 2x2 Jacobian per keypoint, 24 bytes each. Never sent."""
    jacobians = np.asarray(jacobians, dtype=np.float32).reshape(-1, 2, 2)
    if len(jacobians) != len(kps):
        raise KeypointError("keypoint count mismatch")
    return b"".join(
        _POINT_WITH_JACOBIAN.pack(float(x), float(y), *map(float, jac.ravel()))
        for (x, y), jac in zip(kps.points, jacobians)
    )


def _png_length(data: bytes) -> int:
    """Byte length of the PNG at the start of ``data``, found by walking its chunks to IEND."""
    if not data.startswith(_PNG_SIGNATURE):
        raise StreamError("pivot payload is not a PNG image")
    pos = len(_PNG_SIGNATURE)
    while pos + 8 <= len(data):
        (length,) = struct.unpack_from(">I", data, pos)
        chunk_type = data[pos + 4 : pos + 8]
        pos += 12 + length
        if chunk_type == b"IEND":
            if pos > len(data):
                break
            return pos
    raise StreamError("truncated pivot image")


def encode_pivot(frame: Frame, anchor: Optional[KeyPointSet] = None, ledger=None) -> Packet:
    """Lossless PNG of the pivot followed by the pivot's own keypoints (count byte + points)."""
    try:
        buffer = io.BytesIO()
        Image.fromarray(np.asarray(frame.pixels)).save(
            buffer, format="PNG", compress_level=6
        )
    except (OSError, ValueError) as e:
        raise StreamError(f"pivot encode error: {e}") from e
    if anchor is None:
        tail = b"\x00"
    else:
        if anchor.frame_index != frame.index:
            raise StreamError(
                f"pivot encode error: anchor keypoints belong to frame {anchor.frame_index}"
            )
        tail = bytes([len(anchor)]) + _pack_points(anchor)
    packet = Packet(PacketKind.PIVOT, frame.index, buffer.getvalue() + tail)
    if ledger is not None:
        ledger.credit(packet)
    return packet


def decode_pivot(pkt: Packet) -> Tuple[Frame, Optional[KeyPointSet]]:
    if pkt.kind != PacketKind.PIVOT:
        raise StreamError(f"expected a pivot packet, got {pkt.kind.name}")
    png_len = _png_length(pkt.payload)
    try:
        with Image.open(io.BytesIO(pkt.payload[:png_len])) as img:
            pixels = np.array(img.convert("RGB"), dtype=np.uint8)
    except OSError as e:
        raise StreamError(f"pivot decode error: {e}") from e
    tail = pkt.payload[png_len:]
    if not tail:
        raise StreamError("truncated pivot anchor block")
    count = tail[0]
    anchor = _unpack_points(pkt.frame_index, tail[1:], count) if count else None
    return Frame(pixels, pkt.frame_index), anchor


def encode_handshake(cfg: StreamConfig) -> Packet:
    payload = HANDSHAKE_STRUCT.pack(
        cfg.width,
        cfg.height,
        cfg.num_keypoints,
        cfg.interp_frames,
        cfg.sr_factor,
        cfg.sr_patch,
        cfg.fps,
    )
    return Packet(PacketKind.HANDSHAKE, 0, payload)


def decode_handshake(pkt: Packet, thresholds: Optional[PivotThresholds] = None) -> StreamConfig:
    """Policy thresholds are sender-side only and never travel; the receiver keeps its own."""
    if pkt.kind != PacketKind.HANDSHAKE:
        raise StreamError("stream without handshake")
    if len(pkt.payload) != HANDSHAKE_STRUCT.size:
        raise StreamError(f"malformed handshake ({len(pkt.payload)} bytes)")
    width, height, num_kp, interp, sr_factor, sr_patch, fps = HANDSHAKE_STRUCT.unpack(pkt.payload)
    cfg = StreamConfig(
        width=width,
        height=height,
        num_keypoints=num_kp,
        interp_frames=interp,
        sr_factor=sr_factor,
        sr_patch=sr_patch,
        fps=fps,
        pivot_policy=thresholds or PivotThresholds(),
    )
    errors = validate_config(cfg)
    if errors:
        raise StreamError("malformed handshake: " + "; ".join(errors))
    return cfg


def end_of_stream(displayed_frames: int) -> Packet:
    """The end marker carries the displayed frame count so the receiver can schedule trailing frames."""
    return Packet(PacketKind.END_OF_STREAM, displayed_frames)
