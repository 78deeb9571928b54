from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from thcodec.bitstream.ledger import RateLedger
from thcodec.channel.simulator import ChannelReport
from thcodec.config import LOGGER, SETTINGS
from thcodec.core.frames import Frame
from thcodec.core.parallel import parallel_map
from thcodec.exceptions import FrameIOError, MetricError
from thcodec.metrics.quality import psnr, ssim
from thcodec.metrics.rate import BppMode, bpp
from thcodec.pipeline.frames_io import read_frames
from thcodec.sr.resample import bicubic_resample


class EvalReport(BaseModel):
    """Quality and rate of one decoded session. Serialized as the evaluation JSON."""

    frames: int = Field(ge=1)
    width: int
    height: int
    psnr: List[float]
    ssim: List[float]
    mean_psnr: float
    mean_ssim: float
    bpp_paper: float = Field(ge=0)
    bpp_full: float = Field(ge=0)
    replacement_indices: List[int] = Field(default_factory=list)
    channel: Optional[ChannelReport] = None
    fid: Optional[float] = None

    @model_validator(mode="after")
    def consistent(self):
        if len(self.psnr) != self.frames or len(self.ssim) != self.frames:
            raise ValueError("per-frame metrics do not cover every frame")
        if self.bpp_full < self.bpp_paper:
            raise ValueError("bpp_full below bpp_paper")
        return self

    @classmethod
    def from_metrics(cls, psnrs, ssims, ledger: RateLedger, width: int, height: int, **extra):
        return cls(
            frames=len(psnrs),
            width=width,
            height=height,
            psnr=list(psnrs),
            ssim=list(ssims),
            mean_psnr=float(np.mean(psnrs)),
            mean_ssim=float(np.mean(ssims)),
            bpp_paper=bpp(ledger, width, height, BppMode.PAPER),
            bpp_full=bpp(ledger, width, height, BppMode.FULL),
            replacement_indices=list(ledger.replacement_indices),
            **extra,
        )

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path


def evaluate_frames(
    reference: List[Frame],
    decoded: List[Frame],
    ledger: RateLedger,
    channel: Optional[ChannelReport] = None,
    workers: int = SETTINGS.workers,
) -> EvalReport:
    """Reference frames at a different size are bicubic-resampled to the decoded size first."""
    if len(reference) != len(decoded):
        raise MetricError(f"frame count mismatch: {len(reference)} reference vs {len(decoded)} decoded")
    if not decoded:
        raise MetricError("no frames to evaluate")
    width, height = decoded[0].size

    def score(pair):
        ref, out = pair
        if ref.size != out.size:
            ref = bicubic_resample(ref, out.width, out.height)
        return psnr(ref, out), ssim(ref, out)

    pairs = list(zip(reference, decoded))
    scores = parallel_map(score, pairs, workers)
    report = EvalReport.from_metrics(
        [p for p, _ in scores], [s for _, s in scores], ledger, width, height, channel=channel
    )
    LOGGER.info(
        f"PSNR {report.mean_psnr:.2f} dB, SSIM {report.mean_ssim:.4f}, "
        f"bpp {report.bpp_paper:.5f} (full {report.bpp_full:.5f})"
    )
    return report


def evaluate_dirs(
    ref_dir: Union[str, Path],
    out_dir: Union[str, Path],
    ledger: Union[RateLedger, str, Path],
    channel: Optional[ChannelReport] = None,
    workers: int = SETTINGS.workers,
) -> EvalReport:
    if not isinstance(ledger, RateLedger):
        ledger = RateLedger.load(ledger)
    reference = read_frames(ref_dir)
    decoded = read_frames(out_dir)
    if not reference or not decoded:
        raise FrameIOError(f"no frames found in {ref_dir if not reference else out_dir}")
    return evaluate_frames(reference, decoded, ledger, channel, workers)
