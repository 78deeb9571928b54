from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from thcodec.core.frames import Frame, KeyPointSet, to_normalized
from thcodec.exceptions import FlowError

DEFAULT_SIGMA = 0.1


@dataclass(frozen=True)
class DenseFlow:
    """Per-pixel backward displacement in normalized units, ``vectors[y, x] = (dx, dy)``."""

    width: int
    height: int
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.vectors.shape != (self.height, self.width, 2):
            raise FlowError(
                f"flow vectors have shape {self.vectors.shape}, "
                f"expected {(self.height, self.width, 2)}"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise FlowError("flow contains non-finite displacements")

    @classmethod
    def zeros(cls, width: int, height: int) -> "DenseFlow":
        return cls(width, height, np.zeros((height, width, 2)))

    @classmethod
    def from_pixels(cls, pixel_vectors: np.ndarray) -> "DenseFlow":
        """Build from displacements given in pixels."""
        height, width = pixel_vectors.shape[:2]
        scale = np.array([2.0 / (width - 1), 2.0 / (height - 1)])
        return cls(width, height, pixel_vectors * scale)

    def in_pixels(self) -> np.ndarray:
        scale = np.array([(self.width - 1) / 2.0, (self.height - 1) / 2.0])
        return self.vectors * scale

    def __neg__(self) -> "DenseFlow":
        return DenseFlow(self.width, self.height, -self.vectors)


def normalized_grid(width: int, height: int):
    xs = to_normalized(np.arange(width, dtype=np.float64), width)
    ys = to_normalized(np.arange(height, dtype=np.float64), height)
    return xs, ys


def flow_weights(driving_kps: KeyPointSet, sigma: float, width: int, height: int) -> np.ndarray:
    """Softmax-normalized Gaussian weights, shape (height, width, K); they sum to 1 per pixel."""
    if sigma <= 0:
        raise FlowError(f"sigma must be positive, got {sigma}")
    xs, ys = normalized_grid(width, height)
    pts = driving_kps.points.astype(np.float64)
    dist_sq = (xs[None, :, None] - pts[:, 0]) ** 2 + (ys[:, None, None] - pts[:, 1]) ** 2
    logits = -dist_sq / (2.0 * sigma * sigma)
    logits -= logits.max(axis=2, keepdims=True)
    weights = np.exp(logits)
    weights /= weights.sum(axis=2, keepdims=True)
    return weights


def dense_flow(
    source_kps: KeyPointSet,
    driving_kps: KeyPointSet,
    sigma: float = DEFAULT_SIGMA,
    width: int = 256,
    height: int = 256,
) -> DenseFlow:
    if len(source_kps) != len(driving_kps):
        raise FlowError("keypoint count mismatch")
    weights = flow_weights(driving_kps, sigma, width, height)
    # translation only: each keypoint contributes its displacement, no Jacobian
    displacement = source_kps.points.astype(np.float64) - driving_kps.points.astype(np.float64)
    return DenseFlow(width, height, weights @ displacement)


def warp(pivot: Frame, flow: DenseFlow, index: Optional[int] = None) -> Frame:
    """Backward warp: output(z) = bilinear sample of the pivot at z + flow(z), edges clamped."""
    if (flow.width, flow.height) != pivot.size:
        raise FlowError("flow/frame size mismatch")
    offsets = flow.in_pixels()
    rows, cols = np.mgrid[0 : pivot.height, 0 : pivot.width].astype(np.float64)
    sample_x = np.clip(cols + offsets[..., 0], 0, pivot.width - 1)
    sample_y = np.clip(rows + offsets[..., 1], 0, pivot.height - 1)
    coords = np.stack([sample_y, sample_x])

    source = pivot.as_float()
    out = np.empty_like(source)
    for channel in range(3):
        out[..., channel] = ndimage.map_coordinates(
            source[..., channel], coords, order=1, mode="nearest"
        )
    return Frame.from_float(out, pivot.index if index is None else index)
