from thcodec.bitstream.ledger import RateLedger, ledger_sidecar
from thcodec.bitstream.packets import (
    Packet,
    PacketKind,
    decode_handshake,
    decode_keypoints,
    decode_pivot,
    encode_handshake,
    encode_keypoints,
    encode_keypoints_with_jacobians,
    encode_pivot,
    end_of_stream,
    keypoint_payload_size,
)
from thcodec.bitstream.stream import (
    MAGIC,
    dump_stream,
    header_size,
    load_stream,
    read_stream,
    read_stream_file,
    serialize_packet,
    write_stream,
    write_stream_file,
)

__all__ = [
    "MAGIC",
    "Packet",
    "PacketKind",
    "RateLedger",
    "decode_handshake",
    "decode_keypoints",
    "decode_pivot",
    "dump_stream",
    "encode_handshake",
    "encode_keypoints",
    "encode_keypoints_with_jacobians",
    "encode_pivot",
    "end_of_stream",
    "header_size",
    "keypoint_payload_size",
    "ledger_sidecar",
    "load_stream",
    "read_stream",
    "read_stream_file",
    "serialize_packet",
    "write_stream",
    "write_stream_file",
]
