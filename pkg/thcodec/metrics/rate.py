from enum import Enum

from thcodec.bitstream.ledger import RateLedger
from thcodec.exceptions import MetricError


class BppMode(str, Enum):
    PAPER = "paper"  # keypoint payload only
    FULL = "full"  # every bit on the wire


def bpp(ledger: RateLedger, out_w: int, out_h: int, mode: BppMode = BppMode.PAPER) -> float:
    """Bits per displayed output pixel."""
    if ledger.displayed_frames < 1:
        raise MetricError("cannot compute bpp over zero frames")
    if out_w < 1 or out_h < 1:
        raise MetricError(f"invalid output size {out_w}x{out_h}")
    bits = ledger.keypoint_payload_bits if BppMode(mode) == BppMode.PAPER else ledger.total_bits
    return bits / (ledger.displayed_frames * out_w * out_h)


def expected_paper_bpp(num_keypoints: int, interp_frames: int, out_w: int, out_h: int) -> float:
    """Long-sequence limit of paper-mode bpp: one 64-bit keypoint per keyed frame."""
    return num_keypoints * 64 / ((interp_frames + 1) * out_w * out_h)
