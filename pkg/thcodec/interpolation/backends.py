from typing import Optional, Protocol, runtime_checkable

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.exceptions import KeypointError, ScheduleError
from thcodec.motion.backends import ReferenceWarpBackend, WarpBackend
from thcodec.motion.flow import DEFAULT_SIGMA


@runtime_checkable
class InterpBackend(Protocol):
    """Synthesizes a frame between two keyed neighbours. ``left``/``right`` are the
    receiver's reconstructions, the only neighbours it has."""

    def interpolate(
        self,
        left: Frame,
        right: Frame,
        left_kps: KeyPointSet,
        right_kps: KeyPointSet,
        fraction: float,
        pivot: Frame,
        source_kps: KeyPointSet,
    ) -> Frame:
        ...


def _check_fraction(fraction: float) -> None:
    if not 0.0 < fraction < 1.0:
        raise ScheduleError(f"fraction must lie strictly between 0 and 1, got {fraction}")


def reference_interpolate(
    left_kps: KeyPointSet,
    right_kps: KeyPointSet,
    fraction: float,
    pivot: Frame,
    source_kps: KeyPointSet,
    frame_index: Optional[int] = None,
    sigma: float = DEFAULT_SIGMA,
    warp_backend: Optional[WarpBackend] = None,
) -> Frame:
    """Blend the keypoints linearly, then warp the pivot to the blended pose."""
    _check_fraction(fraction)
    if len(left_kps) != len(right_kps):
        raise KeypointError("keypoint count mismatch")
    if frame_index is None:
        span = right_kps.frame_index - left_kps.frame_index
        frame_index = left_kps.frame_index + round(fraction * span)
    mid_kps = left_kps.lerp(right_kps, fraction, frame_index)
    backend = warp_backend or ReferenceWarpBackend(sigma)
    return backend.reconstruct(pivot, source_kps, mid_kps)


class ReferenceInterpBackend:
    def __init__(self, warp_backend: Optional[WarpBackend] = None, sigma: float = DEFAULT_SIGMA):
        self.warp_backend = warp_backend or ReferenceWarpBackend(sigma)

    def interpolate(self, left, right, left_kps, right_kps, fraction, pivot, source_kps) -> Frame:
        index = left.index + round(fraction * (right.index - left.index))
        return reference_interpolate(
            left_kps, right_kps, fraction, pivot, source_kps, index,
            warp_backend=self.warp_backend,
        )


class PixelBlendInterpBackend:
    """Pixel-space cross-fade of the two reconstructed neighbours; the baseline a neural
    interpolator has to beat."""

    def interpolate(self, left, right, left_kps, right_kps, fraction, pivot, source_kps) -> Frame:
        _check_fraction(fraction)
        if left.size != right.size:
            raise ScheduleError("neighbour frames differ in size")
        index = left.index + round(fraction * (right.index - left.index))
        blended = (1.0 - fraction) * left.as_float() + fraction * right.as_float()
        return Frame.from_float(blended, index)


def make_interp_backend(name: str, sigma: float = DEFAULT_SIGMA) -> InterpBackend:
    if name == "reference":
        return ReferenceInterpBackend(sigma=sigma)
    if name == "blend":
        return PixelBlendInterpBackend()
    raise ScheduleError(f"unknown interpolation backend '{name}'")
