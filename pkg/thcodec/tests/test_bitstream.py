import io
import struct

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from thcodec.bitstream.ledger import RateLedger, ledger_sidecar
from thcodec.bitstream.packets import (
    HANDSHAKE_STRUCT,
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
from thcodec.bitstream.stream import MAGIC, dump_stream, header_size, load_stream, write_stream
from thcodec.core.frames import KeyPointSet
from thcodec.core.schemas import PivotThresholds, StreamConfig
from thcodec.exceptions import KeypointError, StreamError
from thcodec.motion.synthetic import base_keypoints


def _session(frame, kps_list):
    packets = [encode_handshake(StreamConfig(width=frame.width, height=frame.height))]
    packets.append(encode_pivot(frame, kps_list[0]))
    packets.extend(encode_keypoints(k) for k in kps_list[1:])
    packets.append(end_of_stream(len(kps_list)))
    return packets


def test_keypoint_payload_is_80_bytes():
    """10 translation-only keypoints take 80 bytes; with Jacobians they would take 240"""
    kps = base_keypoints(10)
    packet = encode_keypoints(kps.with_index(3))
    assert len(packet.payload) == 80 == keypoint_payload_size(10)
    jac = encode_keypoints_with_jacobians(kps, np.tile(np.eye(2), (10, 1, 1)))
    assert len(jac) == 240 == keypoint_payload_size(10, with_jacobians=True)


def test_keypoint_packet_roundtrip_is_bit_exact():
    kps = KeyPointSet.from_pairs(7, [(0.1, -0.3), (1.0, -1.0), (0.123456789, 0.5)])
    assert decode_keypoints(encode_keypoints(kps)) == kps


def test_decode_keypoints_rejects_bad_coordinates():
    payload = struct.pack("<2f", 0.0, 1.5)
    with pytest.raises(KeypointError, match="coordinate out of range in frame 5"):
        decode_keypoints(Packet(PacketKind.KEYPOINTS, 5, payload, 1))
    with pytest.raises(KeypointError, match="truncated keypoint payload"):
        decode_keypoints(Packet(PacketKind.KEYPOINTS, 5, payload[:5], 1))


def test_pivot_roundtrip_carries_anchor(base_frame):
    anchor = base_keypoints(10)
    frame, decoded_anchor = decode_pivot(encode_pivot(base_frame, anchor))
    assert frame == base_frame
    assert decoded_anchor == anchor


def test_pivot_without_anchor(base_frame):
    frame, anchor = decode_pivot(encode_pivot(base_frame))
    assert frame == base_frame
    assert anchor is None


def test_handshake_roundtrip_keeps_receiver_thresholds():
    cfg = StreamConfig(width=320, height=240, num_keypoints=12, interp_frames=3, sr_patch=32)
    thresholds = PivotThresholds.uniform(30.0, 0.07)
    decoded = decode_handshake(encode_handshake(cfg), thresholds)
    assert decoded.model_dump(exclude={"pivot_policy"}) == cfg.model_dump(exclude={"pivot_policy"})
    assert decoded.pivot_policy == thresholds


@pytest.mark.parametrize(
    "fields, reason",
    [
        ((64, 64, 10, 7, 1, 16, 25), "interp_frames out of range"),
        ((64, 64, 10, 1, 0, 16, 25), "sr_factor out of range"),
        ((64, 64, 0, 1, 1, 16, 25), "num_keypoints out of range"),
    ],
)
def test_handshake_with_invalid_fields_is_a_stream_error(fields, reason):
    pkt = Packet(PacketKind.HANDSHAKE, 0, HANDSHAKE_STRUCT.pack(*fields))
    with pytest.raises(StreamError, match=f"malformed handshake: .*{reason}"):
        decode_handshake(pkt)


def test_stream_roundtrip(base_frame):
    packets = _session(base_frame, [base_keypoints(10).with_index(i) for i in range(4)])
    data = dump_stream(packets)
    assert data.startswith(MAGIC)
    assert load_stream(data) == packets


def test_truncated_stream_names_last_good_frame(base_frame):
    packets = _session(base_frame, [base_keypoints(10).with_index(i) for i in range(4)])
    data = dump_stream(packets)
    # drop the end marker (5 bytes) and half of the frame-3 keypoints
    with pytest.raises(StreamError, match="unexpected end of stream after frame 2"):
        load_stream(data[: -5 - 40])


def test_stream_errors():
    with pytest.raises(StreamError, match="bad magic"):
        load_stream(b"XXXX")
    handshake = dump_stream([encode_handshake(StreamConfig()), end_of_stream(1)])
    with pytest.raises(StreamError, match="unknown packet kind 0x7f"):
        load_stream(handshake[: len(MAGIC) + 20] + b"\x7f" + b"\x00" * 4)
    kps_first = MAGIC + b"\x02" + b"\x01\x00\x00\x00" + b"\x00"
    with pytest.raises(StreamError, match="stream without handshake"):
        load_stream(kps_first)
    with pytest.raises(StreamError, match="stream without handshake"):
        write_stream([end_of_stream(0)], io.BytesIO())


def test_ledger_matches_bytes_on_the_wire(base_frame):
    """Magic plus every packet credited equals the serialized stream size"""
    ledger = RateLedger()
    ledger.credit_magic()
    packets = _session(base_frame, [base_keypoints(10).with_index(i) for i in range(5)])
    for packet in packets:
        ledger.credit(packet)
    assert ledger.total_bits == 8 * len(dump_stream(packets))
    assert ledger.keypoint_payload_bits == 4 * 640
    assert ledger.keypoint_packets == 4 and ledger.pivot_packets == 1
    assert ledger.header_bits == 8 * (4 + 5 + HANDSHAKE_STRUCT.size + 9 + 4 * 6 + 5)


def test_ledger_sidecar_roundtrip(tmp_path):
    ledger = RateLedger(keypoint_payload_bits=640, displayed_frames=2, replacement_indices=[1])
    path = ledger.save(ledger_sidecar(tmp_path / "a.thc"))
    assert path.name == "a.thc.ledger.json"
    assert RateLedger.load(path) == ledger


def test_header_sizes():
    assert header_size(Packet(PacketKind.KEYPOINTS, 0)) == 6
    assert header_size(Packet(PacketKind.PIVOT, 0)) == 9
    assert header_size(Packet(PacketKind.HANDSHAKE, 0)) == 5
    assert header_size(Packet(PacketKind.END_OF_STREAM, 0)) == 5


_indices = st.integers(min_value=0, max_value=0xFFFFFFFF)
_keypoint_packets = st.integers(min_value=1, max_value=32).flatmap(
    lambda n: st.builds(
        lambda i, payload: Packet(PacketKind.KEYPOINTS, i, payload, n),
        _indices,
        st.binary(min_size=8 * n, max_size=8 * n),
    )
)
_pivot_packets = st.builds(
    lambda i, payload: Packet(PacketKind.PIVOT, i, payload),
    _indices,
    st.binary(max_size=256),
)
_streams = st.builds(
    lambda hs, body, eos: [Packet(PacketKind.HANDSHAKE, 0, hs)] + body + [end_of_stream(eos)],
    st.binary(min_size=HANDSHAKE_STRUCT.size, max_size=HANDSHAKE_STRUCT.size),
    st.lists(st.one_of(_keypoint_packets, _pivot_packets), max_size=12),
    _indices,
)


@settings(max_examples=1000, deadline=None)
@given(_streams)
def test_random_streams_roundtrip(packets):
    """read(write(s)) == s and the bytes are reproduced exactly"""
    data = dump_stream(packets)
    decoded = load_stream(data)
    assert decoded == packets
    assert dump_stream(decoded) == data
