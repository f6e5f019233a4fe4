"""
Centroid tracker on the sphere.

Bounding boxes from an external detector are reduced to centroids and
matched frame to frame by mutual-nearest central angle. Tracks that go
unmatched for more than deactivate_after frames are deactivated; a track
that reappears before that has its gap filled by linear interpolation.
"""

import itertools
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint, equirect_to_unit_vectors


@dataclass(frozen=True)
class Detection:
    """Bounding box reported for one frame. wrap marks boxes crossing the x seam."""

    frame: int
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    wrap: bool = False

    def __post_init__(self):
        if self.frame < 0:
            raise InvalidInput(f"detection frame must be >= 0, got {self.frame}")
        if self.y_min > self.y_max:
            raise InvalidInput(f"detection at frame {self.frame} has y_min > y_max")
        if not self.wrap and self.x_min > self.x_max:
            raise InvalidInput(f"detection at frame {self.frame} has x_min > x_max without wrap flag")


class TrackState(str, Enum):
    ACTIVE = "active"
    DEACTIVATED = "deactivated"


@dataclass
class ObjectTrack:
    """Centroid trajectory of one object."""

    id: int
    points: List[Tuple[int, EquirectPoint]] = field(default_factory=list)
    state: TrackState = TrackState.ACTIVE
    missing_streak: int = 0

    @property
    def last_frame(self) -> int:
        return self.points[-1][0]

    @property
    def last_point(self) -> EquirectPoint:
        return self.points[-1][1]


@dataclass(frozen=True)
class TrackerConfig:
    deactivate_after: int = 30
    max_match_angle: float = math.pi

    def __post_init__(self):
        if self.deactivate_after < 1:
            raise InvalidInput(f"deactivate_after must be >= 1, got {self.deactivate_after}")
        if not self.max_match_angle > 0:
            raise InvalidInput(f"max_match_angle must be positive, got {self.max_match_angle}")


def centroid(d: Detection, width: float, height: float) -> EquirectPoint:
    """
    Center of a bounding box.

    For seam-wrapping boxes the horizontal center is taken on the arc
    running from x_min rightwards to x_max.
    """
    cy = (d.y_min + d.y_max) / 2.0
    if not d.wrap:
        return EquirectPoint(x=(d.x_min + d.x_max) / 2.0, y=cy)
    span = (d.x_max + width - d.x_min) % width
    return EquirectPoint(x=(d.x_min + span / 2.0) % width, y=cy)


def _central_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise central angle between unit vectors a (n, 3) and b (k, 3)."""
    cross = np.cross(a[:, None, :], b[None, :, :])
    dots = np.clip(np.einsum("ij,kj->ik", a, b), -1.0, 1.0)
    return np.arctan2(np.linalg.norm(cross, axis=-1), dots)


def angular_distance(a: EquirectPoint, b: EquirectPoint, width: float, height: float) -> float:
    """
    Central angle in radians between two frame points on the unit sphere.

    Equivalent to arccos of the clipped dot product, computed with atan2
    so that identical points give exactly 0.
    """
    vectors = equirect_to_unit_vectors([a.x, b.x], [a.y, b.y], width, height)
    return float(_central_angles(vectors[:1], vectors[1:])[0, 0])


def interpolate_gap(
    start: Tuple[int, EquirectPoint], end: Tuple[int, EquirectPoint], width: float
) -> List[Tuple[int, EquirectPoint]]:
    """
    Points for the frames strictly between start and end.

    x moves along the shorter arc across the seam, y linearly.
    """
    f0, p0 = start
    f1, p1 = end
    steps = f1 - f0
    dx = (p1.x - p0.x + width / 2.0) % width - width / 2.0
    dy = p1.y - p0.y
    filled = []
    for k in range(1, steps):
        frac = k / steps
        filled.append((f0 + k, EquirectPoint(x=(p0.x + frac * dx) % width, y=p0.y + frac * dy)))
    return filled


class SphericalCentroidTracker:
    """
    Online tracker. Call step() once per frame in increasing frame order.
    """

    def __init__(self, width: float, height: float, config: Optional[TrackerConfig] = None):
        self.width = width
        self.height = height
        self.config = config or TrackerConfig()
        self.next_id = 0
        self.tracks: "OrderedDict[int, ObjectTrack]" = OrderedDict()
        self._last_frame: Optional[int] = None

    @property
    def active_tracks(self) -> List[ObjectTrack]:
        return [t for t in self.tracks.values() if t.state is TrackState.ACTIVE]

    def register(self, frame: int, point: EquirectPoint) -> int:
        track = ObjectTrack(id=self.next_id, points=[(frame, point)])
        self.tracks[track.id] = track
        self.next_id += 1
        return track.id

    def deactivate(self, track_id: int) -> None:
        self.tracks[track_id].state = TrackState.DEACTIVATED

    def _match(self, current: Sequence[EquirectPoint], active: Sequence[ObjectTrack]) -> List[Tuple[int, int]]:
        """Mutual-nearest pairs (detection index, active index)."""
        if not current or not active:
            return []
        det_vectors = equirect_to_unit_vectors(
            [p.x for p in current], [p.y for p in current], self.width, self.height)
        track_vectors = equirect_to_unit_vectors(
            [t.last_point.x for t in active], [t.last_point.y for t in active], self.width, self.height)
        angles = _central_angles(det_vectors, track_vectors)
        # argmin keeps the first minimum: lowest active ID / lowest detection index
        nearest_track = np.argmin(angles, axis=1)
        nearest_detection = np.argmin(angles, axis=0)
        pairs = []
        for i, j in enumerate(nearest_track):
            if nearest_detection[j] == i and angles[i, j] <= self.config.max_match_angle:
                pairs.append((i, int(j)))
        return pairs

    def step(self, frame: int, detections: Sequence[Detection]) -> Dict[int, int]:
        """
        Process the detections of one frame.

        Args:
            frame: Frame index, greater than the previous call's
            detections: Detections of this frame (may be empty)

        Returns:
            Mapping detection index -> track ID
        """
        if self._last_frame is not None and frame <= self._last_frame:
            raise InvalidInput(f"frame {frame} presented after frame {self._last_frame}")
        for d in detections:
            if d.frame != frame:
                raise InvalidInput(f"detection for frame {d.frame} passed to step for frame {frame}")
        self._last_frame = frame

        current = [centroid(d, self.width, self.height) for d in detections]
        active = self.active_tracks
        assignments: Dict[int, int] = {}

        matched_tracks = set()
        for i, j in self._match(current, active):
            track = active[j]
            if frame - track.last_frame > 1:
                track.points.extend(interpolate_gap(track.points[-1], (frame, current[i]), self.width))
            track.points.append((frame, current[i]))
            track.missing_streak = 0
            assignments[i] = track.id
            matched_tracks.add(track.id)

        for track in active:
            if track.id in matched_tracks:
                continue
            track.missing_streak += 1
            if track.missing_streak > self.config.deactivate_after:
                self.deactivate(track.id)

        for i, point in enumerate(current):
            if i not in assignments:
                assignments[i] = self.register(frame, point)

        return assignments

    def finalize(self) -> List[ObjectTrack]:
        return list(self.tracks.values())


def run_tracker(
    detections: Iterable[Detection], width: float, height: float, config: Optional[TrackerConfig] = None
) -> List[ObjectTrack]:
    """
    Track every object across a whole video.

    Every frame between the first and last detection is stepped, so empty
    frames count towards the disappearance window.

    Args:
        detections: Detections ordered by frame
        width: Frame width in pixels
        height: Frame height in pixels
        config: Tracker configuration

    Returns:
        Tracks in activation order with IDs 0..n-1 and gap-free points

    Raises:
        InvalidInput: if detections are not ordered by frame
    """
    detections = list(detections)
    if not detections:
        return []
    for previous, current in zip(detections, detections[1:]):
        if current.frame < previous.frame:
            raise InvalidInput(f"detections out of order: frame {current.frame} after {previous.frame}")

    by_frame = {frame: list(group) for frame, group in itertools.groupby(detections, key=lambda d: d.frame)}
    tracker = SphericalCentroidTracker(width, height, config)
    for frame in range(detections[0].frame, detections[-1].frame + 1):
        tracker.step(frame, by_frame.get(frame, []))
    return tracker.finalize()
