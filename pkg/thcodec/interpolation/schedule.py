from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum
import math
from typing import Iterator, List, Optional

from thcodec.core.schemas import MAX_INTERP_FRAMES
from thcodec.exceptions import ScheduleError


class FrameTag(str, Enum):
    PIVOT_DIRECT = "pivot"
    KEYED = "keyed"
    INTERPOLATED = "interpolated"
    HOLD = "hold"


ANCHOR_TAGS = (FrameTag.PIVOT_DIRECT, FrameTag.KEYED)


@dataclass(frozen=True)
class ScheduleEntry:
    frame_index: int
    tag: FrameTag
    left_key: Optional[int] = None
    right_key: Optional[int] = None
    fraction: Optional[float] = None

    @property
    def is_anchor(self) -> bool:
        return self.tag in ANCHOR_TAGS


class Schedule(Sequence):
    """What the receiver does for each display frame, indexed by frame ordinal."""

    def __init__(self, entries: List[ScheduleEntry], interp_frames: int):
        self.entries = tuple(entries)
        self.interp_frames = interp_frames

    def __getitem__(self, index):
        return self.entries[index]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ScheduleEntry]:
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Schedule) and self.entries == other.entries

    def __repr__(self) -> str:
        counts = {tag.value: len(self.indices(tag)) for tag in FrameTag}
        return f"Schedule(n={len(self)}, m={self.interp_frames}, {counts})"

    def indices(self, *tags: FrameTag) -> List[int]:
        return [e.frame_index for e in self.entries if e.tag in tags]

    def keyed_indices(self) -> List[int]:
        return self.indices(FrameTag.KEYED)

    def anchor_indices(self) -> List[int]:
        return self.indices(*ANCHOR_TAGS)

    def replace_entries(self, updates: List[ScheduleEntry]) -> "Schedule":
        entries = list(self.entries)
        for entry in updates:
            entries[entry.frame_index] = entry
        return Schedule(entries, self.interp_frames)

    def mark_pivot(self, frame_index: int) -> "Schedule":
        """A keyed frame that was sent as a replacement pivot is displayed directly."""
        entry = self.entries[frame_index]
        if not entry.is_anchor:
            raise ScheduleError(f"frame {frame_index} is {entry.tag.value}, cannot carry a pivot")
        return self.replace_entries([replace(entry, tag=FrameTag.PIVOT_DIRECT)])

    def validate(self, strict: bool = False) -> None:
        """Raise ScheduleError unless tags partition the frames and every span is ordered.

        ``strict`` also requires each run of interpolated frames to be exactly m long,
        which holds for freshly built schedules but not for loss-amended ones.
        """
        if [e.frame_index for e in self.entries] != list(range(len(self.entries))):
            raise ScheduleError("schedule does not cover every frame exactly once")
        if self.entries and self.entries[0].tag != FrameTag.PIVOT_DIRECT:
            raise ScheduleError("frame 0 must be the pivot")
        anchors = set(self.anchor_indices())
        run = 0
        for entry in self.entries:
            if entry.tag == FrameTag.INTERPOLATED:
                left, right = entry.left_key, entry.right_key
                if left not in anchors or right not in anchors:
                    raise ScheduleError(f"frame {entry.frame_index} interpolates non-anchors")
                if not left < entry.frame_index < right:
                    raise ScheduleError(f"frame {entry.frame_index} outside its span")
                if any(k in anchors for k in range(left + 1, right)):
                    raise ScheduleError(f"frame {entry.frame_index} skips an anchor")
                expected = (entry.frame_index - left) / (right - left)
                if not math.isclose(entry.fraction, expected) or not 0 < entry.fraction < 1:
                    raise ScheduleError(f"frame {entry.frame_index} has fraction {entry.fraction}")
                run += 1
                continue
            if entry.tag == FrameTag.HOLD:
                if entry.left_key is None or entry.left_key >= entry.frame_index:
                    raise ScheduleError(f"frame {entry.frame_index} holds a future frame")
            if strict and run not in (0, self.interp_frames):
                raise ScheduleError(f"interpolated run of {run} before frame {entry.frame_index}")
            run = 0
        if strict and run:
            raise ScheduleError("schedule ends with interpolated frames")


def interpolated_entry(frame_index: int, left: int, right: int) -> ScheduleEntry:
    return ScheduleEntry(
        frame_index, FrameTag.INTERPOLATED, left, right, (frame_index - left) / (right - left)
    )


def build_schedule(n_frames: int, interp_frames: int) -> Schedule:
    """Frame 0 is the pivot; keyed frames at 1, 1+(m+1), 1+2(m+1), ... with m interpolated
    frames between neighbours. Frames after the last regular key are keyed too."""
    if n_frames < 1:
        raise ScheduleError(f"n_frames must be at least 1, got {n_frames}")
    if not 0 <= interp_frames <= MAX_INTERP_FRAMES:
        raise ScheduleError("interp_frames out of range")
    step = interp_frames + 1
    entries = [ScheduleEntry(0, FrameTag.PIVOT_DIRECT)]
    if n_frames == 1:
        return Schedule(entries, interp_frames)

    keys = list(range(1, n_frames, step))
    for left, right in zip(keys, keys[1:]):
        entries.append(ScheduleEntry(left, FrameTag.KEYED))
        entries.extend(interpolated_entry(i, left, right) for i in range(left + 1, right))
    entries.extend(ScheduleEntry(i, FrameTag.KEYED) for i in range(keys[-1], n_frames))
    return Schedule(entries, interp_frames)


def transmitted_fraction(n_frames: int, interp_frames: int) -> float:
    """Share of non-pivot frames whose keypoints are sent."""
    if n_frames < 2:
        return 0.0
    return len(build_schedule(n_frames, interp_frames).keyed_indices()) / (n_frames - 1)
