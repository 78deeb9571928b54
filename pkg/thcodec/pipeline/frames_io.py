"""Frame sequences on disk: numbered PNG directories and Y4M files."""
from pathlib import Path
import re
from typing import Iterable, List, Union

import numpy as np
from PIL import Image

from thcodec.config import LOGGER
from thcodec.core.frames import Frame
from thcodec.exceptions import FrameIOError

FRAME_NAME = "frame_{:05d}.png"
_TRAILING_INT = re.compile(r"(\d+)$")
_Y4M_MAGIC = b"YUV4MPEG2"

# BT.601 limited-range YCbCr to RGB
_YUV_TO_RGB = np.array(
    [
        [1.164, 0.0, 1.596],
        [1.164, -0.392, -0.813],
        [1.164, 2.017, 0.0],
    ]
)


def frame_files(directory: Union[str, Path]) -> List[Path]:
    """PNG files of a frame directory, ordered by their trailing frame number."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FrameIOError(f"Frame directory not found at {directory}")
    numbered = []
    for file in directory.glob("*.png"):
        match = _TRAILING_INT.search(file.stem)
        if match:
            numbered.append((int(match.group(1)), file))
    numbered.sort()
    return [file for _, file in numbered]


def read_frame(path: Union[str, Path], index: int) -> Frame:
    try:
        with Image.open(path) as img:
            pixels = np.array(img.convert("RGB"), dtype=np.uint8)
    except OSError as e:
        raise FrameIOError(f"unreadable frame {path}: {e}") from e
    return Frame(pixels, index)


def read_frames(directory: Union[str, Path]) -> List[Frame]:
    return [read_frame(path, i) for i, path in enumerate(frame_files(directory))]


def write_frames(frames: Iterable[Frame], directory: Union[str, Path]) -> List[Path]:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for frame in frames:
            path = directory / FRAME_NAME.format(frame.index)
            Image.fromarray(np.asarray(frame.pixels)).save(path)
            paths.append(path)
    except OSError as e:
        raise FrameIOError(f"cannot write frames to {directory}: {e}") from e
    LOGGER.debug(f"Wrote {len(paths)} frames to {directory}")
    return paths


def _chroma_shape(colorspace: str, width: int, height: int):
    if colorspace.startswith("420"):
        return (height + 1) // 2, (width + 1) // 2
    if colorspace.startswith("444"):
        return height, width
    raise FrameIOError(f"unsupported Y4M colorspace C{colorspace}")


def yuv_to_rgb(y: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    height, width = y.shape
    if u.shape != y.shape:
        u = np.repeat(np.repeat(u, 2, axis=0), 2, axis=1)[:height, :width]
        v = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1)[:height, :width]
    yuv = np.stack(
        [y.astype(np.float64) - 16.0, u.astype(np.float64) - 128.0, v.astype(np.float64) - 128.0],
        axis=-1,
    )
    return np.clip(np.rint(yuv @ _YUV_TO_RGB.T), 0, 255).astype(np.uint8)


def read_y4m(path: Union[str, Path]) -> List[Frame]:
    """8-bit Y4M with 4:2:0 or 4:4:4 chroma."""
    path = Path(path)
    if not path.exists():
        raise FrameIOError(f"Y4M file not found at {path}")
    data = path.read_bytes()
    header_end = data.find(b"\n")
    if not data.startswith(_Y4M_MAGIC) or header_end < 0:
        raise FrameIOError(f"{path.name} is not a Y4M file")

    params = {tok[:1]: tok[1:] for tok in data[len(_Y4M_MAGIC) : header_end].decode().split()}
    try:
        width, height = int(params["W"]), int(params["H"])
    except (KeyError, ValueError):
        raise FrameIOError(f"{path.name}: Y4M header lacks frame size") from None
    colorspace = params.get("C", "420")
    chroma_h, chroma_w = _chroma_shape(colorspace, width, height)
    luma_size = width * height
    chroma_size = chroma_w * chroma_h

    frames = []
    pos = header_end + 1
    while pos < len(data):
        line_end = data.find(b"\n", pos)
        if line_end < 0 or not data.startswith(b"FRAME", pos):
            raise FrameIOError(f"{path.name}: corrupt frame header after frame {len(frames) - 1}")
        pos = line_end + 1
        end = pos + luma_size + 2 * chroma_size
        if end > len(data):
            raise FrameIOError(f"{path.name}: truncated frame {len(frames)}")
        plane = np.frombuffer(data, dtype=np.uint8, count=end - pos, offset=pos)
        y = plane[:luma_size].reshape(height, width)
        u = plane[luma_size : luma_size + chroma_size].reshape(chroma_h, chroma_w)
        v = plane[luma_size + chroma_size :].reshape(chroma_h, chroma_w)
        frames.append(Frame(yuv_to_rgb(y, u, v), len(frames)))
        pos = end
    LOGGER.debug(f"Read {len(frames)} frames from {path.name} ({width}x{height}, C{colorspace})")
    return frames


def load_frames(source: Union[str, Path]) -> List[Frame]:
    """A numbered PNG directory or a .y4m file."""
    source = Path(source)
    if source.suffix.lower() == ".y4m":
        frames = read_y4m(source)
    else:
        frames = read_frames(source)
    if not frames:
        raise FrameIOError(f"no frames found in {source}")
    return frames
