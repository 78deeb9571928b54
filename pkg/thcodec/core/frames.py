from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from thcodec.exceptions import FrameIOError, KeypointError

MIN_FRAME_EDGE = 16

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_pixels(coord: float, size: int) -> float:
    """Normalized [-1, 1] coordinate to pixel position; -1 and 1 are the outer pixel centres."""
    return (coord + 1.0) * (size - 1) / 2.0


def to_normalized(pixel: float, size: int) -> float:
    return 2.0 * pixel / (size - 1) - 1.0


@dataclass(frozen=True, eq=False)
class Frame:
    """A decoded RGB image. ``pixels`` is a read-only (height, width, 3) uint8 array."""

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        pixels = np.ascontiguousarray(self.pixels)
        if pixels.dtype != np.uint8:
            raise FrameIOError(f"frame {self.index}: expected uint8 samples, got {pixels.dtype}")
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise FrameIOError(f"frame {self.index}: expected RGB pixels, got shape {pixels.shape}")
        if pixels.shape[1] < MIN_FRAME_EDGE:
            raise FrameIOError(f"frame {self.index}: width below minimum ({pixels.shape[1]})")
        if pixels.shape[0] < MIN_FRAME_EDGE:
            raise FrameIOError(f"frame {self.index}: height below minimum ({pixels.shape[0]})")
        if self.index < 0:
            raise FrameIOError(f"negative frame index {self.index}")
        if pixels is self.pixels:
            pixels = pixels.copy()
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    @classmethod
    def from_float(cls, values: np.ndarray, index: int = 0) -> "Frame":
        """Round and clip a float image back to 8-bit samples."""
        return cls(np.clip(np.rint(values), 0, 255).astype(np.uint8), index)

    def with_index(self, index: int) -> "Frame":
        return Frame(self.pixels, index)

    def as_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)

    def luma(self) -> np.ndarray:
        return self.as_float() @ LUMA_WEIGHTS

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class KeyPointSet:
    """The per-frame payload: N normalized (x, y) keypoints, stored as float32."""

    frame_index: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float32).reshape(-1, 2)
        if self.frame_index < 0:
            raise KeypointError(f"negative frame index {self.frame_index}")
        if len(points) == 0:
            raise KeypointError("empty keypoint set")
        if not np.all(np.isfinite(points)):
            raise KeypointError(f"frame {self.frame_index}: non-finite coordinate")
        if np.any(np.abs(points) > 1.0):
            raise KeypointError(f"frame {self.frame_index}: coordinate out of range")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_pairs(cls, frame_index: int, pairs: Iterable[Sequence[float]]) -> "KeyPointSet":
        return cls(frame_index, np.asarray(list(pairs), dtype=np.float64))

    @classmethod
    def clamped(cls, frame_index: int, points: np.ndarray) -> "KeyPointSet":
        """Keypoints of a face leaving the frame are clamped onto the border."""
        return cls(frame_index, np.clip(np.asarray(points, dtype=np.float64), -1.0, 1.0))

    def __len__(self) -> int:
        return len(self.points)

    def with_index(self, frame_index: int) -> "KeyPointSet":
        return KeyPointSet(frame_index, self.points)

    def lerp(self, other: "KeyPointSet", fraction: float, frame_index: int) -> "KeyPointSet":
        """(1 - fraction) * self + fraction * other, computed in float64."""
        if len(self) != len(other):
            raise KeypointError("keypoint count mismatch")
        left = self.points.astype(np.float64)
        right = other.points.astype(np.float64)
        return KeyPointSet(frame_index, (1.0 - fraction) * left + fraction * right)

    def to_pixels(self, width: int, height: int) -> np.ndarray:
        pts = self.points.astype(np.float64)
        return np.stack([to_pixels(pts[:, 0], width), to_pixels(pts[:, 1], height)], axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KeyPointSet):
            return NotImplemented
        return self.frame_index == other.frame_index and np.array_equal(
            self.points.view(np.uint32), other.points.view(np.uint32)
        )

    __hash__ = None
