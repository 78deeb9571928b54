import math
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from thcodec.config_loader import get_config
from thcodec.core.frames import MIN_FRAME_EDGE
from thcodec.exceptions import ConfigError

MAX_INTERP_FRAMES = 3
SR_FACTORS = (1, 2)
MIN_SR_PATCH = 8


class PivotThresholds(BaseModel):
    gamma_yaw: float = Field(15.0, description="Yaw delta (degrees) that triggers a new pivot")
    gamma_roll: float = Field(15.0, description="Roll delta (degrees) that triggers a new pivot")
    gamma_pitch: float = Field(15.0, description="Pitch delta (degrees) that triggers a new pivot")
    d_bg: float = Field(0.05, description="Background embedding distance that triggers a new pivot")

    model_config = {"frozen": True}

    @classmethod
    def uniform(cls, gamma: float, d_bg: float = 0.05) -> "PivotThresholds":
        return cls(gamma_yaw=gamma, gamma_roll=gamma, gamma_pitch=gamma, d_bg=d_bg)


class PoseAngles(BaseModel):
    yaw: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0

    model_config = {"frozen": True}

    @field_validator("yaw", "roll", "pitch")
    def within_range(cls, value):
        if not math.isfinite(value) or abs(value) > 90.0:
            raise ValueError(f"pose angle {value} outside [-90, 90]")
        return value


class StreamConfig(BaseModel):
    """Stream parameters shared by sender and receiver; the handshake carries most of them."""

    width: int = 256
    height: int = 256
    num_keypoints: int = 10
    interp_frames: int = 1
    sr_factor: int = 2
    sr_patch: int = 64
    fps: int = 25
    pivot_policy: PivotThresholds = PivotThresholds()

    model_config = {"frozen": True}

    @property
    def output_size(self):
        return self.width * self.sr_factor, self.height * self.sr_factor

    @classmethod
    def from_config(cls, overrides: Optional[Dict[str, Any]] = None) -> "StreamConfig":
        values = get_config("stream")
        policy = get_config("pivot_policy")
        values["pivot_policy"] = PivotThresholds(
            **{k: policy[k] for k in PivotThresholds.model_fields if k in policy}
        )
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(**values)


def validate_config(cfg: StreamConfig) -> List[str]:
    """Return every violated invariant; an empty list means the config is usable."""
    errors = []
    if cfg.width < MIN_FRAME_EDGE:
        errors.append("width below minimum")
    if cfg.height < MIN_FRAME_EDGE:
        errors.append("height below minimum")
    if not 1 <= cfg.num_keypoints <= 255:
        errors.append("num_keypoints out of range")
    if not 0 <= cfg.interp_frames <= MAX_INTERP_FRAMES:
        errors.append("interp_frames out of range")
    if cfg.sr_factor not in SR_FACTORS:
        errors.append("sr_factor out of range")
    if cfg.sr_patch < MIN_SR_PATCH:
        errors.append("sr_patch below minimum")
    elif cfg.sr_patch > 0xFFFF:
        errors.append("sr_patch out of range")
    if not 1 <= cfg.fps <= 0xFFFF:
        errors.append("fps out of range")
    if cfg.width > 0xFFFFFFFF or cfg.height > 0xFFFFFFFF:
        errors.append("resolution out of range")
    for name, value in cfg.pivot_policy.model_dump().items():
        if not value > 0:
            errors.append(f"{name} must be strictly positive")
    return errors


def require_valid(cfg: StreamConfig) -> StreamConfig:
    errors = validate_config(cfg)
    if errors:
        raise ConfigError("invalid stream config: " + "; ".join(errors))
    return cfg
