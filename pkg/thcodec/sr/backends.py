from typing import Protocol, runtime_checkable

import numpy as np
from scipy import ndimage

from thcodec.exceptions import SrError
from thcodec.sr.resample import to_uint8

_GAUSS_3 = np.array([1.0, 2.0, 1.0]) / 4.0
GAUSS_3X3 = np.outer(_GAUSS_3, _GAUSS_3)


@runtime_checkable
class SrBackend(Protocol):
    """Enhances one (k, k, 3) uint8 patch; must return the same shape."""

    def enhance(self, patch: np.ndarray) -> np.ndarray:
        ...


class IdentitySrBackend:
    def enhance(self, patch: np.ndarray) -> np.ndarray:
        return patch


class UnsharpMaskSrBackend:
    """x + amount * (x - gaussian3x3(x)), edges replicated."""

    def __init__(self, amount: float = 0.5):
        self.amount = amount

    def enhance(self, patch: np.ndarray) -> np.ndarray:
        values = np.asarray(patch, dtype=np.float64)
        blurred = ndimage.convolve(values, GAUSS_3X3[..., None], mode="nearest")
        return to_uint8(values + self.amount * (values - blurred))


def make_sr_backend(name: str, amount: float = 0.5) -> SrBackend:
    if name == "identity":
        return IdentitySrBackend()
    if name == "unsharp":
        return UnsharpMaskSrBackend(amount)
    raise SrError(f"unknown super-resolution backend '{name}'")
