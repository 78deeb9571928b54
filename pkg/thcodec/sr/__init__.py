from thcodec.sr.backends import (
    IdentitySrBackend,
    SrBackend,
    UnsharpMaskSrBackend,
    make_sr_backend,
)
from thcodec.sr.resample import bicubic_resample, degrade_for_training, resample_array
from thcodec.sr.tiling import PatchGrid, enhance_image, tile, upscale_and_enhance

__all__ = [
    "IdentitySrBackend",
    "PatchGrid",
    "SrBackend",
    "UnsharpMaskSrBackend",
    "bicubic_resample",
    "degrade_for_training",
    "enhance_image",
    "make_sr_backend",
    "resample_array",
    "tile",
    "upscale_and_enhance",
]
