from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, Field

from thcodec.bitstream.packets import Packet, PacketKind
from thcodec.bitstream.stream import MAGIC, header_size
from thcodec.exceptions import FrameIOError


class RateLedger(BaseModel):
    """Bit counts per packet class for one session. Counts only ever grow."""

    keypoint_payload_bits: int = Field(0, ge=0)
    pivot_payload_bits: int = Field(0, ge=0)
    header_bits: int = Field(0, ge=0)
    displayed_frames: int = Field(0, ge=0)
    keypoint_packets: int = Field(0, ge=0)
    pivot_packets: int = Field(0, ge=0)
    replacement_indices: List[int] = Field(default_factory=list)

    model_config = {"validate_assignment": True}

    def credit(self, packet: Packet) -> None:
        self.header_bits += header_size(packet) * 8
        if packet.kind == PacketKind.KEYPOINTS:
            self.keypoint_payload_bits += packet.payload_bits
            self.keypoint_packets += 1
        elif packet.kind == PacketKind.PIVOT:
            self.pivot_payload_bits += packet.payload_bits
            self.pivot_packets += 1
            if packet.frame_index > 0:
                self.replacement_indices.append(packet.frame_index)
        elif packet.kind == PacketKind.HANDSHAKE:
            # stream control, not content
            self.header_bits += packet.payload_bits

    def credit_magic(self) -> None:
        self.header_bits += len(MAGIC) * 8

    def add_displayed(self, frames: int) -> None:
        if frames < 0:
            raise ValueError("displayed frame count cannot decrease")
        self.displayed_frames += frames

    @property
    def total_bits(self) -> int:
        return self.keypoint_payload_bits + self.pivot_payload_bits + self.header_bits

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RateLedger":
        path = Path(path)
        if not path.exists():
            raise FrameIOError(f"Ledger not found at {path}")
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


def ledger_sidecar(stream_path: Union[str, Path]) -> Path:
    stream_path = Path(stream_path)
    return stream_path.with_name(stream_path.name + ".ledger.json")
