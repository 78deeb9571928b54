from dataclasses import dataclass, field
import math
from typing import List, Optional, Tuple, Union

import numpy as np

from thcodec.core.frames import Frame
from thcodec.core.parallel import parallel_map
from thcodec.exceptions import SrError
from thcodec.sr.backends import SrBackend
from thcodec.sr.resample import bicubic_resample, to_uint8

MIN_PATCH = 8


def _padded_extent(size: int, k: int, stride: int) -> int:
    if size <= k:
        return k
    return math.ceil((size - k) / stride) * stride + k


@dataclass
class PatchGrid:
    """Row-major patch origins over an edge-replicated, padded copy of the image."""

    k: int
    stride: int
    width: int
    height: int
    padded_width: int
    padded_height: int
    origins: List[Tuple[int, int]]
    padded: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.origins)

    def patch(self, i: int) -> np.ndarray:
        x, y = self.origins[i]
        return self.padded[y : y + self.k, x : x + self.k]

    def patches(self) -> List[np.ndarray]:
        return [self.patch(i) for i in range(len(self.origins))]


def tile(img: Union[Frame, np.ndarray], k: int, stride: Optional[int] = None) -> PatchGrid:
    if k < MIN_PATCH:
        raise SrError(f"patch size {k} below minimum ({MIN_PATCH})")
    stride = k if stride is None else stride
    if not 1 <= stride <= k:
        raise SrError(f"stride {stride} must lie in [1, {k}]")
    pixels = img.pixels if isinstance(img, Frame) else np.asarray(img)
    height, width = pixels.shape[:2]
    padded_w = _padded_extent(width, k, stride)
    padded_h = _padded_extent(height, k, stride)
    padded = np.pad(pixels, ((0, padded_h - height), (0, padded_w - width), (0, 0)), mode="edge")
    origins = [
        (x, y)
        for y in range(0, padded_h - k + 1, stride)
        for x in range(0, padded_w - k + 1, stride)
    ]
    return PatchGrid(k, stride, width, height, padded_w, padded_h, origins, padded)


def hann_window(k: int) -> np.ndarray:
    """Strictly positive 2-D Hann weights for blending overlapping patches."""
    ramp = 0.5 - 0.5 * np.cos(2 * np.pi * (np.arange(k) + 0.5) / k)
    return np.outer(ramp, ramp)[..., None]


def enhance_image(
    img: Frame,
    k: int,
    backend: SrBackend,
    stride: Optional[int] = None,
    workers: int = 1,
) -> Frame:
    grid = tile(img, k, stride)
    results = parallel_map(backend.enhance, grid.patches(), workers)
    for result in results:
        if np.shape(result) != (k, k, 3):
            raise SrError(f"backend shape violation: got {np.shape(result)}, expected {(k, k, 3)}")

    if grid.stride == k:
        canvas = np.empty_like(grid.padded)
        for (x, y), result in zip(grid.origins, results):
            canvas[y : y + k, x : x + k] = result
    else:
        window = hann_window(k)
        acc = np.zeros(grid.padded.shape, dtype=np.float64)
        weight = np.zeros(grid.padded.shape[:2] + (1,), dtype=np.float64)
        for (x, y), result in zip(grid.origins, results):
            acc[y : y + k, x : x + k] += window * np.asarray(result, dtype=np.float64)
            weight[y : y + k, x : x + k] += window
        canvas = to_uint8(acc / weight)
    return Frame(canvas[: grid.height, : grid.width], img.index)


def upscale_and_enhance(
    frame: Frame,
    sr_factor: int,
    k: int,
    backend: SrBackend,
    overlap: bool = False,
    workers: int = 1,
) -> Frame:
    """Bicubic upsample of the whole frame, then patch-wise enhancement."""
    if sr_factor != 1:
        frame = bicubic_resample(frame, frame.width * sr_factor, frame.height * sr_factor)
    return enhance_image(frame, k, backend, stride=k // 2 if overlap else k, workers=workers)
