"""
Head-movement trace ingestion.

The contract format is a CSV with header timestamp,w,x,y,z (seconds and
a scalar-first unit quaternion). Two best-effort adapters read the
published dataset layouts:

  ds2  CSV with PlaybackTime and UnitQuaternion.x/.y/.z/.w columns
  ds1  whitespace-separated rows "timestamp frame x y z w"; lines that do
       not start with six numbers are skipped

Both adapters assume the same quaternion convention as the contract
format (identity looks at the frame center). If viewports come out
mirrored or rotated, the convention is the thing to check.
"""

import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import settings
from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint
from geometry.quaternion import HeadQuaternion, quaternion_to_viewport
from utils import console
from utils.file_utils import FileUtils

TRACE_LAYOUTS = ('generic', 'ds1', 'ds2')


@dataclass
class HeadTrace:
    user_id: str
    video_id: str
    samples: List[HeadQuaternion] = field(default_factory=list)

    def __post_init__(self):
        for previous, current in zip(self.samples, self.samples[1:]):
            if current.timestamp < previous.timestamp:
                raise InvalidInput(
                    f"trace {self.user_id}: timestamp {current.timestamp} after {previous.timestamp}")

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([q.timestamp for q in self.samples], dtype=float)


def resample_trace(trace: HeadTrace, fps: int, width: int, height: int, n_frames: Optional[int] = None) -> List[EquirectPoint]:
    """
    Per-frame viewports from a head trace.

    Frame f is at time f / fps and takes the sample with the nearest
    timestamp; on a tie the earlier sample wins.

    Args:
        trace: Head trace
        fps: Frames per second
        width: Frame width in pixels
        height: Frame height in pixels
        n_frames: Number of frames; defaults to every frame up to the last sample

    Returns:
        Viewport per frame

    Raises:
        InvalidInput: if the trace is empty
    """
    if not trace.samples:
        raise InvalidInput(f"trace {trace.user_id} has no samples")
    timestamps = trace.timestamps
    gaps = np.diff(timestamps)
    large = int(np.sum(gaps > settings.TRACE_GAP_WARNING_SECONDS))
    if large:
        console.warn(
            f"trace {trace.user_id} has {large} gap(s) longer than "
            f"{settings.TRACE_GAP_WARNING_SECONDS}s (largest {gaps.max():.2f}s)")

    if n_frames is None:
        n_frames = int(np.floor(timestamps[-1] * fps + 1e-9)) + 1
    frame_times = np.arange(n_frames) / fps
    right = np.clip(np.searchsorted(timestamps, frame_times, side='left'), 0, len(timestamps) - 1)
    left = np.clip(right - 1, 0, len(timestamps) - 1)
    use_left = np.abs(frame_times - timestamps[left]) <= np.abs(timestamps[right] - frame_times)
    chosen = np.where(use_left, left, right)

    converted = {}
    viewports = []
    for index in chosen:
        index = int(index)
        if index not in converted:
            converted[index] = quaternion_to_viewport(trace.samples[index], width, height)
        viewports.append(converted[index])
    return viewports


def _generic(filepath: str) -> List[HeadQuaternion]:
    rows = FileUtils.read_csv(filepath, settings.HEAD_TRACE_HEADER)
    return [HeadQuaternion(
        w=FileUtils._number(row, 'w', filepath),
        x=FileUtils._number(row, 'x', filepath),
        y=FileUtils._number(row, 'y', filepath),
        z=FileUtils._number(row, 'z', filepath),
        timestamp=FileUtils._number(row, 'timestamp', filepath),
    ) for row in rows]


def _ds2(filepath: str) -> List[HeadQuaternion]:
    columns = ['PlaybackTime', 'UnitQuaternion.w', 'UnitQuaternion.x', 'UnitQuaternion.y', 'UnitQuaternion.z']
    rows = FileUtils.read_csv(filepath, columns)
    return [HeadQuaternion(
        w=FileUtils._number(row, 'UnitQuaternion.w', filepath),
        x=FileUtils._number(row, 'UnitQuaternion.x', filepath),
        y=FileUtils._number(row, 'UnitQuaternion.y', filepath),
        z=FileUtils._number(row, 'UnitQuaternion.z', filepath),
        timestamp=FileUtils._number(row, 'PlaybackTime', filepath),
    ) for row in rows]


def _ds1(filepath: str) -> List[HeadQuaternion]:
    samples = []
    with open(filepath, 'r', encoding='utf-8') as f:
        for line in f:
            parts = line.replace(',', ' ').split()
            if len(parts) < 6:
                continue
            try:
                timestamp, _frame, x, y, z, w = (float(value) for value in parts[:6])
            except ValueError:
                continue
            samples.append(HeadQuaternion(w=w, x=x, y=y, z=z, timestamp=timestamp))
    return samples


def read_head_trace(filepath: str, layout: str = 'generic', user_id: Optional[str] = None, video_id: str = '') -> HeadTrace:
    """
    Load a head trace.

    Args:
        filepath: Trace file
        layout: One of TRACE_LAYOUTS
        user_id: Defaults to the file name without extension
        video_id: Video identifier carried into reports

    Returns:
        HeadTrace sorted as found in the file
    """
    readers = {'generic': _generic, 'ds1': _ds1, 'ds2': _ds2}
    if layout not in readers:
        raise InvalidInput(f"unknown trace layout {layout!r}, expected one of {TRACE_LAYOUTS}")
    if not os.path.isfile(filepath):
        raise InvalidInput(f"file not found: {filepath}")
    if user_id is None:
        user_id = os.path.splitext(os.path.basename(filepath))[0]
    return HeadTrace(user_id=user_id, video_id=video_id, samples=readers[layout](filepath))


def write_head_trace(filepath: str, trace: HeadTrace) -> str:
    """Write a trace in the generic layout."""
    rows = ((q.timestamp, q.w, q.x, q.y, q.z) for q in trace.samples)
    return FileUtils.write_csv(filepath, settings.HEAD_TRACE_HEADER, rows)
