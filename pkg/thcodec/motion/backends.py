from typing import Protocol, runtime_checkable

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.exceptions import FlowError
from thcodec.motion.flow import DEFAULT_SIGMA, dense_flow, warp


@runtime_checkable
class WarpBackend(Protocol):
    """Reconstructs a driving frame by animating the pivot. Output size equals pivot size,
    and ``reconstruct(pivot, s, s)`` must return the pivot."""

    def reconstruct(self, pivot: Frame, source_kps: KeyPointSet, driving_kps: KeyPointSet) -> Frame:
        ...


@runtime_checkable
class KeypointDetector(Protocol):
    def detect(self, frame: Frame) -> KeyPointSet:
        ...


def reference_reconstruct(
    pivot: Frame,
    source_kps: KeyPointSet,
    driving_kps: KeyPointSet,
    sigma: float = DEFAULT_SIGMA,
) -> Frame:
    if len(source_kps) != len(driving_kps):
        raise FlowError("keypoint count mismatch")
    flow = dense_flow(source_kps, driving_kps, sigma, pivot.width, pivot.height)
    return warp(pivot, flow, index=driving_kps.frame_index)


class ReferenceWarpBackend:
    """Deterministic Jacobian-free warper: Gaussian-softmax dense flow plus bilinear warp."""

    def __init__(self, sigma: float = DEFAULT_SIGMA):
        if sigma <= 0:
            raise FlowError(f"sigma must be positive, got {sigma}")
        self.sigma = sigma

    def reconstruct(self, pivot: Frame, source_kps: KeyPointSet, driving_kps: KeyPointSet) -> Frame:
        return reference_reconstruct(pivot, source_kps, driving_kps, self.sigma)

    def __repr__(self) -> str:
        return f"ReferenceWarpBackend(sigma={self.sigma})"
