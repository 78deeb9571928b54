from thcodec.metrics.quality import PSNR_CAP, gaussian_window, psnr, ssim, ssim_luma
from thcodec.metrics.rate import BppMode, bpp, expected_paper_bpp
from thcodec.metrics.report import EvalReport, evaluate_dirs, evaluate_frames

__all__ = [
    "BppMode",
    "EvalReport",
    "PSNR_CAP",
    "bpp",
    "evaluate_dirs",
    "evaluate_frames",
    "expected_paper_bpp",
    "gaussian_window",
    "psnr",
    "ssim",
    "ssim_luma",
]
