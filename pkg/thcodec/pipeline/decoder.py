from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union


from thcodec.bitstream.packets import (
    Packet,
    PacketKind,
    decode_handshake,
    decode_keypoints,
    decode_pivot,
)
from thcodec.bitstream.stream import read_stream_file
from thcodec.channel.loss import apply_losses
from thcodec.config import LOGGER, SETTINGS
from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.parallel import parallel_map
from thcodec.core.schemas import StreamConfig, require_valid
from thcodec.exceptions import StreamError
from thcodec.interpolation.schedule import FrameTag, Schedule, build_schedule
from thcodec.pipeline.frames_io import write_frames
from thcodec.pipeline.options import CodecOptions
from thcodec.sr.tiling import upscale_and_enhance


@dataclass
class DecodeResult:
    frames: List[Frame]
    config: StreamConfig
    schedule: Schedule
    missing_keyed: List[int] = field(default_factory=list)
    reconstructed: List[Frame] = field(default_factory=list, repr=False)


@dataclass
class ReceivedStream:
    config: StreamConfig
    n_frames: int
    pivots: Dict[int, Tuple[Frame, Optional[KeyPointSet]]]
    keypoints: Dict[int, KeyPointSet]


def collect_packets(packets: Sequence[Packet]) -> ReceivedStream:
    """Sort delivered packets by class and frame index; delivery order does not matter."""
    if not packets or packets[0].kind != PacketKind.HANDSHAKE:
        raise StreamError("stream without handshake")
    cfg = decode_handshake(packets[0])
    pivots, keypoints, n_frames = {}, {}, None
    for packet in packets[1:]:
        if packet.kind == PacketKind.PIVOT:
            pivots[packet.frame_index] = decode_pivot(packet)
        elif packet.kind == PacketKind.KEYPOINTS:
            kps = decode_keypoints(packet)
            if len(kps) != cfg.num_keypoints:
                raise StreamError(
                    f"frame {packet.frame_index} carries {len(kps)} keypoints, "
                    f"handshake says {cfg.num_keypoints}"
                )
            keypoints[packet.frame_index] = kps
        elif packet.kind == PacketKind.END_OF_STREAM:
            n_frames = packet.frame_index
        else:
            raise StreamError("duplicate handshake")
    if n_frames is None:
        raise StreamError("stream without end-of-stream")
    if 0 not in pivots:
        raise StreamError("stream without initial pivot")
    for index, (frame, _) in pivots.items():
        if frame.size != (cfg.width, cfg.height):
            raise StreamError(f"pivot {index} is {frame.width}x{frame.height}, handshake disagrees")
    return ReceivedStream(cfg, n_frames, pivots, keypoints)


def receiver_schedule(received: ReceivedStream, interp_frames: int) -> Tuple[Schedule, List[int]]:
    """Schedule for what actually arrived: replacement pivots display directly and lost
    keyed frames widen the span around them."""
    schedule = build_schedule(received.n_frames, interp_frames)
    for index in sorted(received.pivots):
        if index == 0:
            continue
        if index >= received.n_frames:
            raise StreamError(f"pivot {index} beyond end of stream")
        schedule = schedule.mark_pivot(index)
    missing = [i for i in schedule.keyed_indices() if i not in received.keypoints]
    if missing:
        LOGGER.warning(f"{len(missing)} keyed frames missing, widening spans: {missing[:10]}")
        schedule = apply_losses(schedule, missing)
    schedule.validate()
    return schedule, missing


def decode_packets(
    packets: Sequence[Packet],
    options: Optional[CodecOptions] = None,
    workers: int = SETTINGS.workers,
    sr_factor: Optional[int] = None,
    sr_patch: Optional[int] = None,
) -> DecodeResult:
    """Reconstruct every display frame at output resolution.

    ``sr_factor`` and ``sr_patch`` override the handshake: enhancement is a receiver choice.
    """
    options = options or CodecOptions.from_config()
    received = collect_packets(packets)
    cfg = received.config
    overrides = {"sr_factor": sr_factor, "sr_patch": sr_patch}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg = require_valid(cfg.model_copy(update=overrides))
    schedule, missing = receiver_schedule(received, cfg.interp_frames)
    pivot_indices = sorted(received.pivots)

    def pivot_at(index: int) -> Tuple[Frame, KeyPointSet]:
        key = max(p for p in pivot_indices if p <= index)
        pivot, anchor = received.pivots[key]
        if anchor is None:
            raise StreamError(f"pivot {key} carries no keypoints to warp from")
        return pivot, anchor

    def anchor_kps(index: int) -> KeyPointSet:
        if schedule[index].tag == FrameTag.PIVOT_DIRECT:
            return pivot_at(index)[1]
        return received.keypoints[index]

    warp_backend = options.warp_backend()

    def reconstruct_anchor(index: int) -> Frame:
        if schedule[index].tag == FrameTag.PIVOT_DIRECT:
            return received.pivots[index][0]
        pivot, source = pivot_at(index)
        return warp_backend.reconstruct(pivot, source, received.keypoints[index])

    anchors = schedule.anchor_indices()
    recon = dict(zip(anchors, parallel_map(reconstruct_anchor, anchors, workers)))

    interp_backend = options.make_interp()

    def reconstruct_other(index: int) -> Frame:
        entry = schedule[index]
        if entry.tag == FrameTag.HOLD:
            return recon[entry.left_key].with_index(index)
        pivot, source = pivot_at(entry.left_key)
        frame = interp_backend.interpolate(
            recon[entry.left_key],
            recon[entry.right_key],
            anchor_kps(entry.left_key),
            anchor_kps(entry.right_key),
            entry.fraction,
            pivot,
            source,
        )
        return frame if frame.index == index else frame.with_index(index)

    others = schedule.indices(FrameTag.INTERPOLATED, FrameTag.HOLD)
    recon.update(zip(others, parallel_map(reconstruct_other, others, workers)))
    low_res = [recon[i] for i in range(received.n_frames)]

    sr_backend = options.make_sr()

    def enhance(frame: Frame) -> Frame:
        return upscale_and_enhance(frame, cfg.sr_factor, cfg.sr_patch, sr_backend, options.overlap)

    frames = parallel_map(enhance, low_res, workers)
    LOGGER.info(
        f"Decoded {len(frames)} frames at {cfg.output_size[0]}x{cfg.output_size[1]} "
        f"({len(pivot_indices)} pivots, {len(missing)} lost keyed frames)"
    )
    return DecodeResult(frames, cfg, schedule, missing, low_res)


def decode_file(
    stream_path: Union[str, Path],
    output_dir: Union[str, Path],
    options: Optional[CodecOptions] = None,
    workers: int = SETTINGS.workers,
    sr_factor: Optional[int] = None,
    sr_patch: Optional[int] = None,
) -> DecodeResult:
    result = decode_packets(read_stream_file(stream_path), options, workers, sr_factor, sr_patch)
    write_frames(result.frames, output_dir)
    LOGGER.info(f"Frames written to {output_dir}")
    return result
