from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from thcodec.bitstream.packets import Packet, encode_pivot
from thcodec.config import LOGGER
from thcodec.core.frames import Frame, KeyPointSet
from thcodec.core.schemas import PivotThresholds, PoseAngles
from thcodec.exceptions import PolicyError
from thcodec.pivot.embedding import BackgroundEmbedding


class Decision(str, Enum):
    KEEP = "keep"
    REPLACE = "replace"


@dataclass(frozen=True)
class PivotState:
    pivot_frame: Frame
    pivot_pose: PoseAngles
    pivot_bg: BackgroundEmbedding
    established_at: int
    anchor_kps: Optional[KeyPointSet] = None


def should_replace(
    state: PivotState,
    pose_i: PoseAngles,
    bg_i: BackgroundEmbedding,
    th: PivotThresholds,
) -> Decision:
    """Breaching any one threshold is enough."""
    pv = state.pivot_pose
    if (
        abs(pose_i.yaw - pv.yaw) > th.gamma_yaw
        or abs(pose_i.roll - pv.roll) > th.gamma_roll
        or abs(pose_i.pitch - pv.pitch) > th.gamma_pitch
        or state.pivot_bg.distance(bg_i) > th.d_bg
    ):
        return Decision.REPLACE
    return Decision.KEEP


def apply_replacement(
    state: Optional[PivotState],
    new_frame: Frame,
    new_pose: PoseAngles,
    new_bg: BackgroundEmbedding,
    ledger=None,
    anchor: Optional[KeyPointSet] = None,
) -> Tuple[PivotState, Packet]:
    """Encode ``new_frame`` as the pivot; the new state is returned only once encoding succeeded."""
    if state is not None and new_frame.index <= state.established_at:
        raise PolicyError(
            f"replacement at frame {new_frame.index} does not follow pivot {state.established_at}"
        )
    packet = encode_pivot(new_frame, anchor, ledger)
    new_state = PivotState(new_frame, new_pose, new_bg, new_frame.index, anchor)
    return new_state, packet


class PivotSelector:
    """Sender-side pivot state machine. Decisions are strictly ordered by frame index.

    With ``cooldown > 0`` a breach within ``cooldown`` frames of the last pivot is deferred:
    it is re-evaluated at later candidate frames and replaces once the window has passed.
    """

    def __init__(self, thresholds: PivotThresholds, cooldown: int = 0, enabled: bool = True):
        if cooldown < 0:
            raise PolicyError(f"cooldown must be nonnegative, got {cooldown}")
        self.thresholds = thresholds
        self.cooldown = cooldown
        self.enabled = enabled
        self.state: Optional[PivotState] = None
        self.replacement_indices: List[int] = []
        self.deferred = 0

    def start(self, frame, pose, bg, anchor=None, ledger=None) -> Packet:
        self.state, packet = apply_replacement(None, frame, pose, bg, ledger, anchor)
        return packet

    def observe(self, frame_index: int, pose: PoseAngles, bg: BackgroundEmbedding) -> Decision:
        if self.state is None:
            raise PolicyError("pivot selector used before the first pivot")
        if frame_index <= self.state.established_at:
            raise PolicyError(f"frame {frame_index} observed out of order")
        if not self.enabled:
            return Decision.KEEP
        decision = should_replace(self.state, pose, bg, self.thresholds)
        if decision == Decision.REPLACE and frame_index - self.state.established_at < self.cooldown:
            self.deferred += 1
            LOGGER.debug(f"Pivot replacement at frame {frame_index} deferred by cooldown")
            return Decision.KEEP
        return decision

    def replace(self, frame, pose, bg, anchor=None, ledger=None) -> Packet:
        self.state, packet = apply_replacement(self.state, frame, pose, bg, ledger, anchor)
        self.replacement_indices.append(frame.index)
        LOGGER.info(f"New pivot at frame {frame.index} ({len(packet.payload)} bytes)")
        return packet


def replay_trace(
    poses: Sequence[PoseAngles],
    embeddings: Sequence[BackgroundEmbedding],
    thresholds: PivotThresholds,
    candidate_indices: Optional[Sequence[int]] = None,
    cooldown: int = 0,
) -> List[int]:
    """Replacement indices for a pose/background trace, without touching pixels.

    Frame 0 is the initial pivot; only ``candidate_indices`` (default: every later frame)
    are evaluated, mirroring the sender which only checks frames it sends keypoints for.
    """
    if len(poses) != len(embeddings):
        raise PolicyError("pose and embedding traces differ in length")
    if not poses:
        return []
    candidates = range(1, len(poses)) if candidate_indices is None else candidate_indices
    pose_pv, bg_pv, established = poses[0], embeddings[0], 0
    replaced = []
    for i in candidates:
        state = PivotState(None, pose_pv, bg_pv, established)
        if should_replace(state, poses[i], embeddings[i], thresholds) == Decision.REPLACE:
            if i - established < cooldown:
                continue
            pose_pv, bg_pv, established = poses[i], embeddings[i], i
            replaced.append(i)
    return replaced
