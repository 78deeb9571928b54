"""Pose and mask inputs produced by external estimators.

Pose sidecar: one line per frame, ``index yaw roll pitch`` in degrees.
Mask directory: one single-channel PNG per frame, nonzero = face.
"""
from pathlib import Path
import re
from typing import Dict, Iterable, Tuple, Union

import numpy as np
import pandas as pd
from PIL import Image

from thcodec.core.schemas import PoseAngles
from thcodec.exceptions import FrameIOError, PolicyError

_TRAILING_INT = re.compile(r"(\d+)$")


def read_pose_sidecar(path: Union[str, Path]) -> Dict[int, PoseAngles]:
    path = Path(path)
    if not path.exists():
        raise FrameIOError(f"Pose sidecar not found at {path}")
    try:
        df = pd.read_csv(
            path, sep=r"\s+", header=None, comment="#", names=["frame", "yaw", "roll", "pitch"]
        )
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise PolicyError(f"pose sidecar {path.name} is unreadable: {e}") from e
    if df.empty:
        raise PolicyError(f"pose sidecar {path.name} has no rows")
    if df.isna().any().any():
        raise PolicyError(f"pose sidecar {path.name} has incomplete rows")
    try:
        return {
            int(row.frame): PoseAngles(yaw=row.yaw, roll=row.roll, pitch=row.pitch)
            for row in df.itertuples(index=False)
        }
    except ValueError as e:
        raise PolicyError(f"pose sidecar {path.name}: {e}") from e


def write_pose_sidecar(path: Union[str, Path], poses: Iterable[Tuple[int, PoseAngles]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(
        [(i, p.yaw, p.roll, p.pitch) for i, p in poses], columns=["frame", "yaw", "roll", "pitch"]
    )
    df.to_csv(path, sep=" ", header=False, index=False, float_format="%.6f")
    return path


class MaskDirectory:
    """Face masks keyed by the trailing integer of each PNG's file name."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise FrameIOError(f"Mask directory not found at {self.directory}")
        self.files = {}
        for file in sorted(self.directory.glob("*.png")):
            match = _TRAILING_INT.search(file.stem)
            if match:
                self.files[int(match.group(1))] = file

    def background(self, index: int, width: int, height: int) -> np.ndarray:
        if index not in self.files:
            raise FrameIOError(f"no mask for frame {index} in {self.directory}")
        with Image.open(self.files[index]) as img:
            face = np.array(img.convert("L"))
        if face.shape != (height, width):
            raise PolicyError(f"mask for frame {index} has shape {face.shape}")
        return face == 0
