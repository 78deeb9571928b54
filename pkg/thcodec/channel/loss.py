from typing import Iterable

from thcodec.config import LOGGER
from thcodec.exceptions import ScheduleError
from thcodec.interpolation.schedule import FrameTag, Schedule, ScheduleEntry, interpolated_entry


def receiver_loss_policy(schedule: Schedule, dropped_keyed_index: int) -> Schedule:
    """Widen the span around a lost keyed frame.

    Every frame strictly between the nearest surviving anchors is re-tagged as interpolated
    between them. With no surviving anchor to the right the frames hold the left anchor.
    """
    if not 0 <= dropped_keyed_index < len(schedule):
        raise ScheduleError(f"frame {dropped_keyed_index} is not in the schedule")
    if schedule[dropped_keyed_index].tag != FrameTag.KEYED:
        raise ScheduleError(
            f"frame {dropped_keyed_index} is {schedule[dropped_keyed_index].tag.value}, not keyed"
        )
    anchors = [i for i in schedule.anchor_indices() if i != dropped_keyed_index]
    left = max(i for i in anchors if i < dropped_keyed_index)
    right = min((i for i in anchors if i > dropped_keyed_index), default=None)

    if right is None:
        updates = [
            ScheduleEntry(i, FrameTag.HOLD, left_key=left) for i in range(left + 1, len(schedule))
        ]
        LOGGER.warning(f"No keyed frame after {left}; holding it for {len(updates)} frames")
    else:
        updates = [interpolated_entry(i, left, right) for i in range(left + 1, right)]
    return schedule.replace_entries(updates)


def apply_losses(schedule: Schedule, dropped_keyed_indices: Iterable[int]) -> Schedule:
    for index in sorted(set(dropped_keyed_indices)):
        schedule = receiver_loss_policy(schedule, index)
    return schedule
