"""Simulated transmission between one encoder session and one decoder session.

Keypoint packets may be lost or swapped with their neighbour in lossy mode. Handshake,
Pivot and EndOfStream packets ride a reliable sub-channel: a lost attempt is retransmitted
until it gets through, and every attempt costs bits. Time is simulated, never slept.
"""
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from thcodec.bitstream.packets import Packet, PacketKind
from thcodec.bitstream.stream import serialize_packet
from thcodec.config import LOGGER
from thcodec.config_loader import get_config
from thcodec.exceptions import StreamError

# attempts per reliable packet before the simulation gives up
MAX_ATTEMPTS = 10_000


class ChannelMode(str, Enum):
    RELIABLE = "reliable"
    LOSSY = "lossy"


class ChannelConfig(BaseModel):
    mode: ChannelMode = ChannelMode.RELIABLE
    loss_rate: float = Field(0.0, ge=0.0, lt=1.0)
    reorder_rate: float = Field(0.0, ge=0.0, lt=1.0)
    seed: int = Field(7, ge=0, lt=2**64)
    bandwidth_bits_per_s: Optional[float] = Field(None, gt=0)
    latency_ms: float = Field(0.0, ge=0.0)

    model_config = {"frozen": True}

    @classmethod
    def from_config(cls, overrides: Optional[dict] = None) -> "ChannelConfig":
        values = get_config("channel")
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(**values)


def _kind_counts() -> Dict[str, int]:
    return {kind.name.lower(): 0 for kind in PacketKind}


class ChannelReport(BaseModel):
    sent: Dict[str, int] = Field(default_factory=_kind_counts)
    delivered: Dict[str, int] = Field(default_factory=_kind_counts)
    dropped: Dict[str, int] = Field(default_factory=_kind_counts)
    total_bits: int = 0
    retransmissions: int = 0
    reordered: int = 0
    simulated_time_s: float = 0.0
    dropped_indices: List[int] = Field(default_factory=list)

    def is_conserved(self) -> bool:
        return all(
            self.delivered[name] + self.dropped[name] == self.sent[name] for name in self.sent
        )


def transmit(packets: Sequence[Packet], cfg: ChannelConfig) -> Tuple[List[Packet], ChannelReport]:
    """Deterministic for a given seed. Delivery order is the input order unless reordering
    swapped two adjacent keypoint packets."""
    if not packets or packets[0].kind != PacketKind.HANDSHAKE:
        raise StreamError("stream without handshake")
    rng = np.random.default_rng(cfg.seed)
    lossy = cfg.mode == ChannelMode.LOSSY
    report = ChannelReport()
    delivered: List[Packet] = []

    for packet in packets:
        name = packet.kind.name.lower()
        bits = len(serialize_packet(packet)) * 8
        report.sent[name] += 1
        report.total_bits += bits
        if not lossy or cfg.loss_rate == 0.0:
            delivered.append(packet)
            report.delivered[name] += 1
            continue

        lost = rng.random() < cfg.loss_rate
        if packet.kind == PacketKind.KEYPOINTS:
            if lost:
                report.dropped[name] += 1
                report.dropped_indices.append(packet.frame_index)
                continue
        else:
            attempts = 0
            while lost:
                attempts += 1
                if attempts >= MAX_ATTEMPTS:
                    raise StreamError(f"reliable delivery of frame {packet.frame_index} failed")
                report.total_bits += bits
                lost = rng.random() < cfg.loss_rate
            report.retransmissions += attempts
        delivered.append(packet)
        report.delivered[name] += 1

    if lossy and cfg.reorder_rate > 0.0:
        report.reordered = _reorder_adjacent(delivered, cfg.reorder_rate, rng)

    report.simulated_time_s = cfg.latency_ms / 1000.0
    if cfg.bandwidth_bits_per_s:
        report.simulated_time_s += report.total_bits / cfg.bandwidth_bits_per_s

    if report.dropped_indices:
        LOGGER.warning(
            f"Channel dropped {len(report.dropped_indices)} keypoint packets: "
            f"{report.dropped_indices[:10]}{'...' if len(report.dropped_indices) > 10 else ''}"
        )
    LOGGER.info(
        f"Channel delivered {len(delivered)}/{len(packets)} packets, {report.total_bits} bits, "
        f"{report.simulated_time_s:.3f}s simulated"
    )
    return delivered, report


def _reorder_adjacent(packets: List[Packet], rate: float, rng: np.random.Generator) -> int:
    swaps = 0
    i = 0
    while i + 1 < len(packets):
        a, b = packets[i], packets[i + 1]
        if a.kind == b.kind == PacketKind.KEYPOINTS and rng.random() < rate:
            packets[i], packets[i + 1] = b, a
            swaps += 1
            i += 2
            continue
        i += 1
    return swaps
