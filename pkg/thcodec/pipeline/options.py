from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, Field, ValidationError
import yaml

from thcodec.channel.simulator import ChannelConfig
from thcodec.config_loader import get_config, resolve_path
from thcodec.core.schemas import StreamConfig, require_valid
from thcodec.exceptions import ConfigError, FrameIOError
from thcodec.interpolation.backends import InterpBackend, make_interp_backend
from thcodec.motion.backends import ReferenceWarpBackend
from thcodec.sr.backends import SrBackend, make_sr_backend


class CodecOptions(BaseModel):
    """Knobs that never travel in the handshake: backends, policy switches, blending."""

    sigma: float = Field(0.1, gt=0)
    interp_backend: str = "reference"
    sr_backend: str = "unsharp"
    unsharp_amount: float = 0.5
    overlap: bool = False
    policy_enabled: bool = False
    cooldown: int = Field(0, ge=0)
    border_band: float = Field(0.2, gt=0, lt=0.5)

    model_config = {"frozen": True}

    @classmethod
    def from_config(cls, overrides: Optional[Dict[str, Any]] = None) -> "CodecOptions":
        sr = get_config("sr")
        policy = get_config("pivot_policy")
        values = {
            "sigma": get_config("motion").get("sigma", 0.1),
            "interp_backend": get_config("interpolation").get("backend", "reference"),
            "sr_backend": sr.get("backend", "unsharp"),
            "unsharp_amount": sr.get("unsharp_amount", 0.5),
            "overlap": sr.get("overlap", False),
            "policy_enabled": policy.get("enabled", False),
            "cooldown": policy.get("cooldown", 0),
            "border_band": policy.get("border_band", 0.2),
        }
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(**values)

    def warp_backend(self) -> ReferenceWarpBackend:
        return ReferenceWarpBackend(self.sigma)

    def make_interp(self) -> InterpBackend:
        return make_interp_backend(self.interp_backend, self.sigma)

    def make_sr(self) -> SrBackend:
        return make_sr_backend(self.sr_backend, self.unsharp_amount)


_PATH_FIELDS = ("input", "stream_path", "output", "keypoints", "pose", "masks", "report")


class SessionManifest(BaseModel):
    """One encode/channel/decode/evaluate session, loaded from a YAML key-value file.

    Relative paths resolve against the manifest's own directory.
    """

    input: Path
    stream_path: Path
    output: Optional[Path] = None
    keypoints: Optional[Path] = None
    pose: Optional[Path] = None
    masks: Optional[Path] = None
    report: Optional[Path] = None
    stream: StreamConfig = Field(default_factory=StreamConfig.from_config)
    channel: ChannelConfig = Field(default_factory=ChannelConfig.from_config)
    options: CodecOptions = Field(default_factory=CodecOptions.from_config)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SessionManifest":
        path = Path(path)
        if not path.exists():
            raise FrameIOError(f"Manifest not found at {path}")
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"manifest {path.name} is not valid YAML: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"manifest {path.name} must be a mapping")

        for key in _PATH_FIELDS:
            if raw.get(key):
                raw[key] = resolve_path(raw[key], root=path.parent)
        try:
            raw["stream"] = StreamConfig.from_config(raw.get("stream"))
            raw["channel"] = ChannelConfig.from_config(raw.get("channel"))
            raw["options"] = CodecOptions.from_config(raw.get("options"))
            return cls(**raw)
        except ValidationError as e:
            raise ConfigError(f"invalid manifest {path.name}: {e}") from e

    def check(self) -> "SessionManifest":
        """Referenced inputs must exist and the stream config must validate."""
        require_valid(self.stream)
        for name in ("input", "keypoints", "pose", "masks"):
            value = getattr(self, name)
            if value is not None and not value.exists():
                raise FrameIOError(f"manifest {name} not found at {value}")
        if self.options.policy_enabled and self.pose is None:
            raise ConfigError("pose sidecar required when the pivot policy is enabled")
        return self
