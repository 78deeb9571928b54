import math

import numpy as np
from scipy.signal import convolve2d

from thcodec.core.frames import Frame
from thcodec.exceptions import MetricError

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
PEAK = 255.0


def _check_same_size(a: Frame, b: Frame) -> None:
    if a.size != b.size:
        raise MetricError(f"dimension mismatch: {a.size} vs {b.size}")


def psnr(a: Frame, b: Frame) -> float:
    """PSNR over all three channels, capped so identical frames stay finite."""
    _check_same_size(a, b)
    mse = float(np.mean((a.as_float() - b.as_float()) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(PEAK**2 / mse))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    y, x = np.ogrid[-half : half + 1, -half : half + 1]
    window = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return window / window.sum()


def ssim_luma(x: np.ndarray, y: np.ndarray) -> float:
    """Mean SSIM over all fully contained 11x11 windows of two luma planes."""
    if x.shape != y.shape:
        raise MetricError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < SSIM_WINDOW:
        raise MetricError(f"frames too small for SSIM (minimum {SSIM_WINDOW} pixels)")
    window = gaussian_window()
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2

    def filt(img):
        return convolve2d(img, np.rot90(window, 2), mode="valid")

    mu_x = filt(x)
    mu_y = filt(y)
    mu_xx = mu_x * mu_x
    mu_yy = mu_y * mu_y
    mu_xy = mu_x * mu_y
    var_x = filt(x * x) - mu_xx
    var_y = filt(y * y) - mu_yy
    cov = filt(x * y) - mu_xy

    ssim_map = ((2 * mu_xy + c1) * (2 * cov + c2)) / ((mu_xx + mu_yy + c1) * (var_x + var_y + c2))
    return float(np.mean(ssim_map))


def ssim(a: Frame, b: Frame) -> float:
    _check_same_size(a, b)
    return ssim_luma(a.luma(), b.luma())
