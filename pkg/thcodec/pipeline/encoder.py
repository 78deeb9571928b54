from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from thcodec.bitstream.ledger import RateLedger, ledger_sidecar
from thcodec.bitstream.packets import Packet, encode_handshake, encode_keypoints, end_of_stream
from thcodec.bitstream.stream import write_stream_file
from thcodec.config import LOGGER
from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.schemas import PoseAngles, StreamConfig, require_valid
from thcodec.exceptions import ConfigError, FrameIOError, KeypointError, PolicyError
from thcodec.interpolation.schedule import Schedule, build_schedule
from thcodec.motion.backends import KeypointDetector
from thcodec.pipeline.options import CodecOptions
from thcodec.pivot.embedding import BackgroundEmbedding, background_embedding, border_band_mask
from thcodec.pivot.policy import Decision, PivotSelector
from thcodec.pivot.sidecars import MaskDirectory


@dataclass
class EncodeResult:
    packets: List[Packet]
    ledger: RateLedger
    schedule: Schedule
    replacement_indices: List[int] = field(default_factory=list)


class _Observer:
    """Pose and background embedding per frame, as the pivot policy sees them."""

    def __init__(self, options: CodecOptions, poses, masks: Optional[MaskDirectory]):
        self.enabled = options.policy_enabled
        self.poses = poses or {}
        self.masks = masks
        self.band = options.border_band

    def __call__(self, frame: Frame) -> Tuple[PoseAngles, BackgroundEmbedding]:
        if not self.enabled:
            return PoseAngles(), BackgroundEmbedding.uniform()
        if frame.index not in self.poses:
            raise PolicyError(f"no pose for frame {frame.index} in pose sidecar")
        if self.masks is not None:
            bg_mask = self.masks.background(frame.index, frame.width, frame.height)
        else:
            bg_mask = border_band_mask(frame.width, frame.height, self.band)
        return self.poses[frame.index], background_embedding(frame, bg_mask)


def _detect(detector: KeypointDetector, frame: Frame, cfg: StreamConfig) -> KeyPointSet:
    kps = detector.detect(frame)
    if len(kps) != cfg.num_keypoints:
        raise KeypointError(
            f"detector returned {len(kps)} keypoints for frame {frame.index}, "
            f"stream expects {cfg.num_keypoints}"
        )
    return kps if kps.frame_index == frame.index else kps.with_index(frame.index)


def encode_frames(
    frames: Sequence[Frame],
    cfg: StreamConfig,
    detector: KeypointDetector,
    options: Optional[CodecOptions] = None,
    poses: Optional[Dict[int, PoseAngles]] = None,
    masks: Optional[MaskDirectory] = None,
) -> EncodeResult:
    """Handshake, pivot f0, then a KeyPoints packet per keyed frame (or a replacement
    pivot when the policy fires), then EndOfStream."""
    require_valid(cfg)
    options = options or CodecOptions.from_config()
    if not frames:
        raise FrameIOError("no frames to encode")
    for frame in frames:
        if frame.size != (cfg.width, cfg.height):
            raise FrameIOError(
                f"frame {frame.index} is {frame.width}x{frame.height}, "
                f"stream is {cfg.width}x{cfg.height}"
            )
    if options.policy_enabled and poses is None:
        raise ConfigError("pose sidecar required when the pivot policy is enabled")

    frames = [f if f.index == i else f.with_index(i) for i, f in enumerate(frames)]
    observe = _Observer(options, poses, masks)
    schedule = build_schedule(len(frames), cfg.interp_frames)
    selector = PivotSelector(cfg.pivot_policy, options.cooldown, options.policy_enabled)
    ledger = RateLedger()
    ledger.credit_magic()

    handshake = encode_handshake(cfg)
    ledger.credit(handshake)
    pose, bg = observe(frames[0])
    packets = [handshake, selector.start(frames[0], pose, bg, _detect(detector, frames[0], cfg), ledger)]

    for i in tqdm(schedule.keyed_indices(), desc="Encoding", leave=False):
        frame = frames[i]
        kps = _detect(detector, frame, cfg)
        if options.policy_enabled:
            pose, bg = observe(frame)
            if selector.observe(i, pose, bg) == Decision.REPLACE:
                packets.append(selector.replace(frame, pose, bg, kps, ledger))
                schedule = schedule.mark_pivot(i)
                continue
        packets.append(encode_keypoints(kps, ledger))

    eos = end_of_stream(len(frames))
    ledger.credit(eos)
    ledger.add_displayed(len(frames))
    packets.append(eos)
    LOGGER.info(
        f"Encoded {len(frames)} frames: {ledger.keypoint_packets} keypoint packets, "
        f"{ledger.pivot_packets} pivots, {ledger.total_bits} bits"
    )
    return EncodeResult(packets, ledger, schedule, list(selector.replacement_indices))


def write_session(result: EncodeResult, stream_path: Union[str, Path]) -> Path:
    """Write the .thc stream and its ledger sidecar; returns the sidecar path."""
    stream_path = Path(stream_path)
    written = write_stream_file(result.packets, stream_path)
    sidecar = result.ledger.save(ledger_sidecar(stream_path))
    LOGGER.info(f"Stream written to {stream_path} ({written} bytes), ledger {sidecar.name}")
    return sidecar
