"""Grid sweeps over interpolation depth, patch size and pivot thresholds."""
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator
from tqdm import tqdm
import yaml

from thcodec.config import LOGGER, SETTINGS
from thcodec.config_loader import get_config
from thcodec.core.frames import Frame
from thcodec.core.schemas import PivotThresholds, PoseAngles, StreamConfig, require_valid
from thcodec.exceptions import ConfigError, FrameIOError
from thcodec.metrics.rate import BppMode, bpp
from thcodec.metrics.report import evaluate_frames
from thcodec.motion.backends import KeypointDetector
from thcodec.pipeline.decoder import decode_packets
from thcodec.pipeline.encoder import encode_frames
from thcodec.pipeline.options import CodecOptions
from thcodec.pivot.sidecars import MaskDirectory

COLUMNS = [
    "interp_frames",
    "sr_patch",
    "gamma",
    "d_bg",
    "keypoint_packets",
    "pivot_packets",
    "replacements",
    "bpp_paper",
    "bpp_full",
    "mean_psnr",
    "mean_ssim",
]


class SweepSpec(BaseModel):
    interp_frames: List[int] = Field(default_factory=lambda: [1])
    sr_patch: List[int] = Field(default_factory=lambda: [64])
    gamma: List[float] = Field(default_factory=lambda: [15.0])
    d_bg: List[float] = Field(default_factory=lambda: [0.05])

    @field_validator("interp_frames", "sr_patch", "gamma", "d_bg")
    def not_empty(cls, value):
        if not value:
            raise ValueError("empty sweep")
        return value

    @classmethod
    def from_config(cls, overrides: Optional[Dict[str, Any]] = None) -> "SweepSpec":
        values = get_config("ablation")
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"invalid sweep: {e}") from e

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SweepSpec":
        path = Path(path)
        if not path.exists():
            raise FrameIOError(f"Sweep spec not found at {path}")
        return cls.from_config(yaml.safe_load(path.read_text(encoding="utf-8")) or {})

    def grid(self, base: StreamConfig) -> List[StreamConfig]:
        """Row-major over (m, k, gamma, d_bg); every point must validate before any runs."""
        configs = []
        for m, k, gamma, d_bg in product(self.interp_frames, self.sr_patch, self.gamma, self.d_bg):
            cfg = base.model_copy(
                update={
                    "interp_frames": m,
                    "sr_patch": k,
                    "pivot_policy": PivotThresholds.uniform(gamma, d_bg),
                }
            )
            configs.append(require_valid(cfg))
        return configs


def run_ablation(
    frames: Sequence[Frame],
    detector: KeypointDetector,
    base: StreamConfig,
    sweep: SweepSpec,
    options: Optional[CodecOptions] = None,
    poses: Optional[Dict[int, PoseAngles]] = None,
    rate_only: bool = False,
    workers: int = SETTINGS.workers,
    masks: Optional[MaskDirectory] = None,
) -> pd.DataFrame:
    """One row per grid point. Quality columns are NaN with ``rate_only``.

    ``masks`` feeds the background embedding; without it the border band stands in.
    """
    options = options or CodecOptions.from_config()
    rows = []
    for cfg in tqdm(sweep.grid(base), desc="Ablation", leave=False):
        encoded = encode_frames(frames, cfg, detector, options, poses, masks)
        out_w, out_h = cfg.output_size
        row = {
            "interp_frames": cfg.interp_frames,
            "sr_patch": cfg.sr_patch,
            "gamma": cfg.pivot_policy.gamma_yaw,
            "d_bg": cfg.pivot_policy.d_bg,
            "keypoint_packets": encoded.ledger.keypoint_packets,
            "pivot_packets": encoded.ledger.pivot_packets,
            "replacements": len(encoded.replacement_indices),
            "bpp_paper": bpp(encoded.ledger, out_w, out_h, BppMode.PAPER),
            "bpp_full": bpp(encoded.ledger, out_w, out_h, BppMode.FULL),
            "mean_psnr": float("nan"),
            "mean_ssim": float("nan"),
        }
        if not rate_only:
            decoded = decode_packets(encoded.packets, options, workers)
            report = evaluate_frames(list(frames), decoded.frames, encoded.ledger, workers=workers)
            row["mean_psnr"] = report.mean_psnr
            row["mean_ssim"] = report.mean_ssim
        LOGGER.debug(f"Ablation point {row}")
        rows.append(row)
    return pd.DataFrame(rows, columns=COLUMNS)


def save_ablation(df: pd.DataFrame, output_dir: Union[str, Path]) -> List[Path]:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = output_dir / "ablation.csv"
    json_path = output_dir / "ablation.json"
    df.to_csv(csv_path, index=False)
    df.to_json(json_path, orient="records", indent=2)
    LOGGER.info(f"Ablation table ({len(df)} rows) written to {csv_path} and {json_path.name}")
    return [csv_path, json_path]
