from functools import lru_cache

import numpy as np
import scipy.sparse

from thcodec.core.frames import Frame
from thcodec.exceptions import SrError

CATMULL_ROM_A = -0.5
MIN_DEGRADE_FACTOR = 2.0
MAX_DEGRADE_FACTOR = 6.0


def cubic_kernel(distance: np.ndarray, a: float = CATMULL_ROM_A) -> np.ndarray:
    d = np.abs(distance)
    near = ((a + 2) * d - (a + 3)) * d * d + 1
    far = ((a * d - 5 * a) * d + 8 * a) * d - 4 * a
    return np.where(d <= 1, near, np.where(d < 2, far, 0.0))


@lru_cache(maxsize=64)
def resample_matrix(in_size: int, out_size: int) -> scipy.sparse.csr_matrix:
    """(out_size, in_size) bicubic weights with pixel-centre alignment and edge clamping."""
    out_pos = np.arange(out_size, dtype=np.float64)
    src = (out_pos + 0.5) * (in_size / out_size) - 0.5
    base = np.floor(src)
    frac = src - base
    rows, cols, vals = [], [], []
    for tap in (-1, 0, 1, 2):
        rows.append(out_pos.astype(np.int64))
        cols.append(np.clip(base + tap, 0, in_size - 1).astype(np.int64))
        vals.append(cubic_kernel(frac - tap))
    # duplicate (row, col) pairs from clamping are summed on conversion
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(out_size, in_size),
    )
    return matrix.tocsr()


def resample_array(image: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Separable bicubic resize of an (H, W, C) array; returns float64, unrounded."""
    if out_w < 1 or out_h < 1:
        raise SrError(f"output dimensions must be positive, got {out_w}x{out_h}")
    image = np.asarray(image, dtype=np.float64)
    height, width, channels = image.shape
    rows = resample_matrix(height, out_h) @ image.reshape(height, width * channels)
    cols = np.transpose(rows.reshape(out_h, width, channels), (1, 0, 2))
    out = resample_matrix(width, out_w) @ cols.reshape(width, out_h * channels)
    return np.transpose(out.reshape(out_w, out_h, channels), (1, 0, 2))


def to_uint8(values: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def bicubic_resample(img: Frame, out_w: int, out_h: int) -> Frame:
    return Frame(to_uint8(resample_array(img.pixels, out_w, out_h)), img.index)


def degrade_for_training(patch: np.ndarray, factor: float) -> np.ndarray:
    """Bicubic down by ``factor`` then back up: the corruption an enhancement backend learns to undo."""
    if factor < MIN_DEGRADE_FACTOR:
        raise SrError(f"factor below 2 ({factor})")
    if factor > MAX_DEGRADE_FACTOR:
        raise SrError(f"factor above 6 ({factor})")
    patch = np.asarray(patch)
    height, width = patch.shape[:2]
    small_w = max(1, round(width / factor))
    small_h = max(1, round(height / factor))
    small = to_uint8(resample_array(patch, small_w, small_h))
    return to_uint8(resample_array(small, width, height))
