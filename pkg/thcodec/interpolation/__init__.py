from thcodec.interpolation.backends import (
    InterpBackend,
    PixelBlendInterpBackend,
    ReferenceInterpBackend,
    make_interp_backend,
    reference_interpolate,
)
from thcodec.interpolation.schedule import (
    FrameTag,
    Schedule,
    ScheduleEntry,
    build_schedule,
    transmitted_fraction,
)

__all__ = [
    "FrameTag",
    "InterpBackend",
    "PixelBlendInterpBackend",
    "ReferenceInterpBackend",
    "Schedule",
    "ScheduleEntry",
    "build_schedule",
    "make_interp_backend",
    "reference_interpolate",
    "transmitted_fraction",
]
