"""Keypoint sidecar files: one line per frame, ``index x0 y0 x1 y1 ...``."""
from pathlib import Path
from typing import Dict, Iterable, Union

import numpy as np
import pandas as pd

from thcodec.core.frames import Frame, KeyPointSet
from thcodec.exceptions import FrameIOError, KeypointError


def write_keypoint_sidecar(path: Union[str, Path], keypoints: Iterable[KeyPointSet]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for kps in keypoints:
        # repr of the float32 value widened to float64 parses back bit-exactly
        coords = " ".join(repr(float(v)) for v in kps.points.ravel())
        lines.append(f"{kps.frame_index} {coords}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_keypoint_sidecar(path: Union[str, Path], num_keypoints: int) -> Dict[int, KeyPointSet]:
    path = Path(path)
    if not path.exists():
        raise FrameIOError(f"Keypoint sidecar not found at {path}")
    try:
        df = pd.read_csv(path, sep=r"\s+", header=None, comment="#", float_precision="round_trip")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise KeypointError(f"keypoint sidecar {path.name} is unreadable: {e}") from e
    expected_cols = 1 + 2 * num_keypoints
    if df.shape[1] != expected_cols:
        raise KeypointError(
            f"keypoint sidecar {path.name} has {df.shape[1]} columns, expected {expected_cols}"
        )
    sets = {}
    for row in df.itertuples(index=False):
        index = int(row[0])
        sets[index] = KeyPointSet(index, np.asarray(row[1:], dtype=np.float64).reshape(-1, 2))
    return sets


class SidecarKeypointSource:
    """KeypointDetector backed by a sidecar file, looked up by frame index."""

    def __init__(self, keypoints: Dict[int, KeyPointSet]):
        self.keypoints = keypoints

    @classmethod
    def from_file(cls, path: Union[str, Path], num_keypoints: int) -> "SidecarKeypointSource":
        return cls(read_keypoint_sidecar(path, num_keypoints))

    def detect(self, frame: Frame) -> KeyPointSet:
        try:
            return self.keypoints[frame.index]
        except KeyError:
            raise KeypointError(f"no keypoints for frame {frame.index} in sidecar") from None
