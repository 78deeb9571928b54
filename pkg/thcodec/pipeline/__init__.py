from thcodec.pipeline.decoder import DecodeResult, decode_file, decode_packets, receiver_schedule
from thcodec.pipeline.encoder import EncodeResult, encode_frames, write_session
from thcodec.pipeline.frames_io import (
    FRAME_NAME,
    frame_files,
    load_frames,
    read_frames,
    read_y4m,
    write_frames,
)
from thcodec.pipeline.options import CodecOptions, SessionManifest

__all__ = [
    "CodecOptions",
    "DecodeResult",
    "EncodeResult",
    "FRAME_NAME",
    "SessionManifest",
    "decode_file",
    "decode_packets",
    "encode_frames",
    "frame_files",
    "load_frames",
    "read_frames",
    "read_y4m",
    "receiver_schedule",
    "write_frames",
    "write_session",
]
