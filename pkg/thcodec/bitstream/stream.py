"""The .thc container: magic, then packets back to back.

Every packet starts with ``kind:u8 frame_index:u32``. KeyPoints packets follow with a
``count:u8`` and ``count * 8`` payload bytes, Pivot packets with ``length:u32`` and the
payload, Handshake packets with a fixed 15-byte payload and EndOfStream with nothing.
All integers little-endian.
"""
import io
from pathlib import Path
import struct
from typing import BinaryIO, Iterable, List, Union

from thcodec.bitstream.packets import HANDSHAKE_STRUCT, KEYPOINT_BYTES, Packet, PacketKind
from thcodec.exceptions import FrameIOError, StreamError

MAGIC = b"THC1"
_PREFIX = struct.Struct("<BI")
_U32 = struct.Struct("<I")

_HEADER_BYTES = {
    PacketKind.HANDSHAKE: _PREFIX.size,
    PacketKind.PIVOT: _PREFIX.size + _U32.size,
    PacketKind.KEYPOINTS: _PREFIX.size + 1,
    PacketKind.END_OF_STREAM: _PREFIX.size,
}


def header_size(packet: Packet) -> int:
    return _HEADER_BYTES[packet.kind]


def serialize_packet(packet: Packet) -> bytes:
    prefix = _PREFIX.pack(int(packet.kind), packet.frame_index)
    if packet.kind == PacketKind.KEYPOINTS:
        if len(packet.payload) != packet.count * KEYPOINT_BYTES:
            raise StreamError(f"truncated keypoint payload in frame {packet.frame_index}")
        return prefix + bytes([packet.count]) + packet.payload
    if packet.kind == PacketKind.PIVOT:
        return prefix + _U32.pack(len(packet.payload)) + packet.payload
    if packet.kind == PacketKind.HANDSHAKE:
        if len(packet.payload) != HANDSHAKE_STRUCT.size:
            raise StreamError("malformed handshake")
        return prefix + packet.payload
    return prefix


def write_stream(packets: Iterable[Packet], sink: BinaryIO) -> int:
    packets = list(packets)
    if not packets or packets[0].kind != PacketKind.HANDSHAKE:
        raise StreamError("stream without handshake")
    if packets[-1].kind != PacketKind.END_OF_STREAM:
        raise StreamError("stream without end-of-stream")
    written = sink.write(MAGIC)
    for packet in packets:
        written += sink.write(serialize_packet(packet))
    return written


class _Reader:
    def __init__(self, source: BinaryIO):
        self.source = source
        self.last_frame = None

    def truncated(self) -> StreamError:
        where = "after handshake" if self.last_frame is None else f"after frame {self.last_frame}"
        return StreamError(f"unexpected end of stream {where}")

    def take(self, size: int) -> bytes:
        data = self.source.read(size)
        if len(data) != size:
            raise self.truncated()
        return data


def read_stream(source: BinaryIO) -> List[Packet]:
    reader = _Reader(source)
    if source.read(len(MAGIC)) != MAGIC:
        raise StreamError("not a .thc stream (bad magic)")
    packets: List[Packet] = []
    while True:
        head = source.read(1)
        if not head:
            if not packets:
                raise StreamError("stream without handshake")
            raise reader.truncated()
        try:
            kind = PacketKind(head[0])
        except ValueError:
            raise StreamError(f"unknown packet kind 0x{head[0]:02x}") from None
        if not packets and kind != PacketKind.HANDSHAKE:
            raise StreamError("stream without handshake")
        (frame_index,) = _U32.unpack(reader.take(_U32.size))

        if kind == PacketKind.KEYPOINTS:
            count = reader.take(1)[0]
            packet = Packet(kind, frame_index, reader.take(count * KEYPOINT_BYTES), count)
        elif kind == PacketKind.PIVOT:
            (length,) = _U32.unpack(reader.take(_U32.size))
            packet = Packet(kind, frame_index, reader.take(length))
        elif kind == PacketKind.HANDSHAKE:
            packet = Packet(kind, frame_index, reader.take(HANDSHAKE_STRUCT.size))
        else:
            packet = Packet(kind, frame_index)

        packets.append(packet)
        if kind != PacketKind.HANDSHAKE:
            reader.last_frame = frame_index
        if kind == PacketKind.END_OF_STREAM:
            return packets


def dump_stream(packets: Iterable[Packet]) -> bytes:
    buffer = io.BytesIO()
    write_stream(packets, buffer)
    return buffer.getvalue()


def load_stream(data: bytes) -> List[Packet]:
    return read_stream(io.BytesIO(data))


def write_stream_file(packets: Iterable[Packet], path: Union[str, Path]) -> int:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as sink:
            return write_stream(packets, sink)
    except OSError as e:
        raise FrameIOError(f"cannot write stream {path}: {e}") from e


def read_stream_file(path: Union[str, Path]) -> List[Packet]:
    path = Path(path)
    if not path.exists():
        raise FrameIOError(f"Stream not found at {path}")
    with path.open("rb") as source:
        return read_stream(source)
