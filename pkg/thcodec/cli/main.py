from functools import wraps
import json
from pathlib import Path
import shutil
from typing import Optional

import typer

from thcodec.bitstream.ledger import RateLedger, ledger_sidecar
from thcodec.bitstream.stream import read_stream_file, write_stream_file
from thcodec.channel.simulator import ChannelConfig, ChannelMode, ChannelReport, transmit
from thcodec.config import DECODED_DIR, LOGGER, REPORTS_DIR, SETTINGS, STREAMS_DIR, SYNTHETIC_DIR
from thcodec.core.schemas import PivotThresholds, StreamConfig
from thcodec.exceptions import CodecError, ConfigError, FrameIOError
from thcodec.metrics.report import evaluate_dirs
from thcodec.motion.sources import SidecarKeypointSource
from thcodec.pipeline.ablation import SweepSpec, run_ablation, save_ablation
from thcodec.pipeline.decoder import decode_file
from thcodec.pipeline.encoder import encode_frames, write_session
from thcodec.pipeline.frames_io import load_frames
from thcodec.pipeline.options import CodecOptions, SessionManifest
from thcodec.pipeline.synthetic_clip import make_synthetic_clip, write_synthetic_clip
from thcodec.pivot.sidecars import MaskDirectory, read_pose_sidecar

app = typer.Typer(help="Keypoint talking-head codec: encode, decode, simulate, evaluate, ablate.")


def _exit_on_error(fn):
    """Map codec errors to the documented exit codes."""

    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CodecError as e:
            LOGGER.error(f"{type(e).__name__}: {e}")
            raise typer.Exit(code=e.exit_code) from e

    return wrapper


def _session_inputs(manifest: SessionManifest):
    manifest.check()
    frames = load_frames(manifest.input)
    if manifest.keypoints is None:
        raise ConfigError("keypoint sidecar required: no keypoint detector backend is installed")
    detector = SidecarKeypointSource.from_file(manifest.keypoints, manifest.stream.num_keypoints)
    poses = read_pose_sidecar(manifest.pose) if manifest.pose else None
    masks = MaskDirectory(manifest.masks) if manifest.masks else None
    return frames, detector, poses, masks


@app.command()
@_exit_on_error
def synth(
    output: Path = typer.Option(SYNTHETIC_DIR / "clip", help="Directory for the synthetic clip."),
    frames: int = typer.Option(100, min=1, help="Number of frames."),
    width: int = typer.Option(256, help="Frame width."),
    height: int = typer.Option(256, help="Frame height."),
    kp: int = typer.Option(10, help="Keypoints per frame."),
    trajectory: str = typer.Option("linear", help="linear (exact interpolation) or sinusoidal."),
    pose_trace: str = typer.Option("keypoints", help="keypoints (derived) or stepped (scripted yaw)."),
    seed: int = typer.Option(0, help="Scene seed."),
):
    """Write a synthetic clip: frames, keypoint and pose sidecars, and a manifest."""
    clip = make_synthetic_clip(frames, width, height, kp, trajectory, pose_trace, seed)
    manifest = write_synthetic_clip(clip, output)
    typer.echo(str(manifest))


@app.command()
@_exit_on_error
def encode(
    input_path: Optional[Path] = typer.Option(None, "--input", help="PNG frame directory or .y4m file."),
    output: Optional[Path] = typer.Option(None, help="Output .thc stream."),
    manifest: Optional[Path] = typer.Option(None, help="Session manifest (YAML)."),
    interp: Optional[int] = typer.Option(None, help="Interpolated frames between keyed frames (0-3)."),
    kp: Optional[int] = typer.Option(None, help="Keypoints per frame."),
    keypoints: Optional[Path] = typer.Option(None, help="Keypoint sidecar file."),
    pose: Optional[Path] = typer.Option(None, help="Pose sidecar (index yaw roll pitch)."),
    masks: Optional[Path] = typer.Option(None, help="Face mask directory."),
    gamma: Optional[float] = typer.Option(None, help="Pose threshold in degrees (all three axes)."),
    dbg: Optional[float] = typer.Option(None, help="Background embedding distance threshold."),
    policy: Optional[bool] = typer.Option(None, "--policy/--no-policy", help="Adaptive pivot replacement."),
    cooldown: Optional[int] = typer.Option(None, help="Frames to wait after a replacement."),
):
    """Encode a frame sequence into a .thc stream plus ledger sidecar."""
    if manifest is not None:
        session = SessionManifest.load(manifest)
    elif input_path is not None:
        session = SessionManifest(input=input_path, stream_path=output or STREAMS_DIR / "session.thc")
    else:
        raise ConfigError("either --input or --manifest is required")

    if policy is None and any(v is not None for v in (pose, gamma, dbg)):
        # --pose, --gamma and --dbg imply --policy
        policy = True
    stream_updates = {"interp_frames": interp, "num_keypoints": kp}
    if gamma is not None or dbg is not None:
        current = session.stream.pivot_policy
        stream_updates["pivot_policy"] = PivotThresholds.uniform(
            gamma if gamma is not None else current.gamma_yaw,
            dbg if dbg is not None else current.d_bg,
        )
    session = session.model_copy(
        update={
            k: v
            for k, v in {
                "stream_path": output,
                "keypoints": keypoints,
                "pose": pose,
                "masks": masks,
                "stream": session.stream.model_copy(
                    update={k: v for k, v in stream_updates.items() if v is not None}
                ),
                "options": session.options.model_copy(
                    update={
                        k: v
                        for k, v in {"policy_enabled": policy, "cooldown": cooldown}.items()
                        if v is not None
                    }
                ),
            }.items()
            if v is not None
        }
    )

    frames, detector, poses, mask_dir = _session_inputs(session)
    width, height = frames[0].size
    cfg = session.stream.model_copy(update={"width": width, "height": height})
    result = encode_frames(frames, cfg, detector, session.options, poses, mask_dir)
    write_session(result, session.stream_path)
    typer.echo(str(session.stream_path))


@app.command()
@_exit_on_error
def decode(
    input_path: Path = typer.Option(STREAMS_DIR / "session.thc", "--input", help="Input .thc stream."),
    output: Path = typer.Option(DECODED_DIR / "session", help="Output frame directory."),
    sr: Optional[int] = typer.Option(None, help="Super-resolution factor (1 or 2); default from handshake."),
    patch: Optional[int] = typer.Option(None, help="SR patch size; default from handshake."),
    overlap: Optional[bool] = typer.Option(None, "--overlap/--no-overlap", help="Hann-blended half-stride patches."),
    sr_backend: Optional[str] = typer.Option(None, help="identity or unsharp."),
    interp_backend: Optional[str] = typer.Option(None, help="reference or blend."),
    workers: int = typer.Option(SETTINGS.workers, help="Worker threads."),
):
    """Decode a .thc stream to a numbered PNG directory."""
    options = CodecOptions.from_config(
        {"overlap": overlap, "sr_backend": sr_backend, "interp_backend": interp_backend}
    )
    result = decode_file(input_path, output, options, workers, sr, patch)
    typer.echo(f"{len(result.frames)} frames -> {output}")


@app.command()
@_exit_on_error
def simulate(
    input_path: Path = typer.Option(STREAMS_DIR / "session.thc", "--input", help="Input .thc stream."),
    output: Path = typer.Option(STREAMS_DIR / "delivered.thc", help="Delivered .thc stream."),
    loss: Optional[float] = typer.Option(None, help="Keypoint packet loss probability."),
    reorder: Optional[float] = typer.Option(None, help="Adjacent keypoint packet swap probability."),
    bandwidth: Optional[float] = typer.Option(None, help="Channel capacity in bits per second."),
    latency: Optional[float] = typer.Option(None, help="Fixed delay in milliseconds."),
    seed: Optional[int] = typer.Option(None, help="Channel seed."),
    report: Optional[Path] = typer.Option(None, help="Channel report JSON (default: next to output)."),
):
    """Pass a stream through the simulated channel."""
    overrides = {
        "loss_rate": loss,
        "reorder_rate": reorder,
        "bandwidth_bits_per_s": bandwidth,
        "latency_ms": latency,
        "seed": seed,
    }
    if (loss or 0) > 0 or (reorder or 0) > 0:
        overrides["mode"] = ChannelMode.LOSSY
    try:
        cfg = ChannelConfig.from_config(overrides)
    except ValueError as e:
        raise ConfigError(f"invalid channel settings: {e}") from e

    delivered, channel_report = transmit(read_stream_file(input_path), cfg)
    write_stream_file(delivered, output)
    sender_ledger = ledger_sidecar(input_path)
    if sender_ledger.exists():
        shutil.copyfile(sender_ledger, ledger_sidecar(output))
    report_path = report or output.with_name(output.name + ".channel.json")
    report_path.write_text(channel_report.model_dump_json(indent=2), encoding="utf-8")
    typer.echo(str(report_path))


@app.command()
@_exit_on_error
def evaluate(
    ref: Path = typer.Option(..., help="Reference frame directory."),
    out: Path = typer.Option(..., help="Decoded frame directory."),
    ledger: Path = typer.Option(..., help="Ledger sidecar of the stream."),
    report: Path = typer.Option(REPORTS_DIR / "report.json", help="Evaluation report JSON."),
    channel: Optional[Path] = typer.Option(None, help="Channel report JSON to embed."),
    workers: int = typer.Option(SETTINGS.workers, help="Worker threads."),
):
    """Score decoded frames against the reference and write the report."""
    channel_report = None
    if channel is not None:
        if not channel.exists():
            raise FrameIOError(f"Channel report not found at {channel}")
        channel_report = ChannelReport.model_validate_json(channel.read_text(encoding="utf-8"))
    result = evaluate_dirs(ref, out, RateLedger.load(ledger), channel_report, workers)
    result.save(report)
    typer.echo(
        json.dumps(
            {"mean_psnr": result.mean_psnr, "mean_ssim": result.mean_ssim, "bpp": result.bpp_paper}
        )
    )


@app.command()
@_exit_on_error
def ablate(
    manifest: Path = typer.Option(..., help="Session manifest providing frames and sidecars."),
    spec: Optional[Path] = typer.Option(None, help="Sweep spec (YAML); default from config.yaml."),
    output: Path = typer.Option(REPORTS_DIR / "ablation", help="Directory for ablation.csv/json."),
    rate_only: bool = typer.Option(False, "--rate-only", help="Skip decoding and quality metrics."),
    policy: Optional[bool] = typer.Option(
        None, "--policy/--no-policy", help="Adaptive pivot replacement; default from the manifest."
    ),
    sr: Optional[int] = typer.Option(None, help="SR factor for every grid point."),
    workers: int = typer.Option(SETTINGS.workers, help="Worker threads."),
):
    """Sweep (m, k, gamma, d_bg) and tabulate rate and quality."""
    session = SessionManifest.load(manifest)
    sweep = SweepSpec.load(spec) if spec else SweepSpec.from_config()
    if policy is not None:
        session = session.model_copy(
            update={"options": session.options.model_copy(update={"policy_enabled": policy})}
        )
    frames, detector, poses, mask_dir = _session_inputs(session)
    width, height = frames[0].size
    updates = {"width": width, "height": height}
    if sr is not None:
        updates["sr_factor"] = sr
    base: StreamConfig = session.stream.model_copy(update=updates)
    df = run_ablation(
        frames, detector, base, sweep, session.options, poses, rate_only, workers, mask_dir
    )
    save_ablation(df, output)
    typer.echo(df.to_string(index=False))


if __name__ == "__main__":
    app()
