from dataclasses import dataclass, field

import numpy as np

from thcodec.core.frames import Frame
from thcodec.exceptions import PolicyError

GRID = 16
EMBEDDING_SIZE = GRID * GRID


@dataclass(frozen=True, eq=False)
class BackgroundEmbedding:
    """256 pooled grayscale background cells, L2-normalized."""

    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=np.float64).ravel()
        if vector.shape != (EMBEDDING_SIZE,):
            raise PolicyError(f"embedding must have {EMBEDDING_SIZE} values, got {vector.size}")
        if abs(np.linalg.norm(vector) - 1.0) > 1e-6:
            raise PolicyError("embedding is not unit length")
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)

    @classmethod
    def uniform(cls) -> "BackgroundEmbedding":
        return cls(np.full(EMBEDDING_SIZE, 1.0 / GRID))

    def distance(self, other: "BackgroundEmbedding") -> float:
        return float(np.linalg.norm(self.vector - other.vector))


def _cell_bounds(size: int) -> np.ndarray:
    return np.linspace(0, size, GRID + 1).astype(np.int64)


def background_embedding(frame: Frame, bg_mask: np.ndarray) -> BackgroundEmbedding:
    """Average-pool the masked luma to 16x16; cells without background take the background mean."""
    bg_mask = np.asarray(bg_mask, dtype=bool)
    if bg_mask.shape != (frame.height, frame.width):
        raise PolicyError(f"mask shape {bg_mask.shape} does not match frame {frame.size}")
    if not bg_mask.any():
        raise PolicyError(f"no background pixels in frame {frame.index}")

    luma = frame.luma()
    rows = _cell_bounds(frame.height)[:-1]
    cols = _cell_bounds(frame.width)[:-1]
    sums = np.add.reduceat(np.add.reduceat(luma * bg_mask, rows, axis=0), cols, axis=1)
    counts = np.add.reduceat(np.add.reduceat(bg_mask.astype(np.int64), rows, axis=0), cols, axis=1)

    fill = luma[bg_mask].mean()
    cells = np.where(counts > 0, sums / np.maximum(counts, 1), fill).ravel()
    norm = np.linalg.norm(cells)
    if norm == 0.0:
        # all-black background has no direction
        return BackgroundEmbedding.uniform()
    return BackgroundEmbedding(cells / norm)


def border_band_mask(width: int, height: int, band: float = 0.2) -> np.ndarray:
    """Fallback background mask for runs without segmentation: the outer ring is background."""
    if not 0.0 < band < 0.5:
        raise PolicyError(f"border band {band} must lie in (0, 0.5)")
    bx = max(1, int(round(width * band)))
    by = max(1, int(round(height * band)))
    mask = np.ones((height, width), dtype=bool)
    mask[by : height - by, bx : width - bx] = False
    return mask
