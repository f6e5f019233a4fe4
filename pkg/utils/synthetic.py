"""
Synthetic viewport and object scenarios.

object_follower  the viewport follows object 0 plus Gaussian noise; the
                 object moves with piecewise-constant velocity, reflecting
                 off a band away from the seam and the poles
wanderer         the viewport is a smooth random walk unrelated to the
                 objects in the scene
seam_crosser     the viewport follows an object that keeps moving right
                 and crosses x = 0 repeatedly

Every scenario is deterministic given its seed. Users share the objects
and differ only in their own noise (or walk) stream.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from config.settings import settings
from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint
from predictors.base import ObjectFrame
from tracking.tracker import Detection


class Scenario(str, Enum):
    OBJECT_FOLLOWER = "object_follower"
    WANDERER = "wanderer"
    SEAM_CROSSER = "seam_crosser"


SCENARIOS = [s.value for s in Scenario]


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = Scenario.OBJECT_FOLLOWER.value
    duration_seconds: float = settings.SYNTH_DURATION_SECONDS
    fps: int = settings.FPS
    width: int = settings.FRAME_WIDTH
    height: int = settings.FRAME_HEIGHT
    seed: int = settings.SEED
    noise_px: float = settings.SYNTH_NOISE_PX
    users: int = 1
    distractors: int = 0
    # Horizontal object speed is redrawn uniformly in [-max_speed, max_speed] px/s
    max_speed: float = 240.0
    max_vertical_speed: float = 40.0

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise InvalidInput(f"unknown scenario {self.name!r}, expected one of {SCENARIOS}")
        if self.duration_seconds <= 0 or self.fps < 1:
            raise InvalidInput("scenario needs a positive duration and fps >= 1")
        if self.users < 1 or self.distractors < 0 or self.noise_px < 0 or self.seed < 0:
            raise InvalidInput("scenario needs users >= 1, distractors >= 0, noise >= 0 and seed >= 0")

    @property
    def frames(self) -> int:
        return int(round(self.duration_seconds * self.fps))


@dataclass
class SyntheticTrace:
    viewports: List[EquirectPoint]
    object_frames: List[ObjectFrame]
    users: Dict[str, List[EquirectPoint]] = field(default_factory=dict)


def _reflect(value: float, velocity: float, low: float, high: float) -> Tuple[float, float]:
    if value < low:
        return 2 * low - value, -velocity
    if value > high:
        return 2 * high - value, -velocity
    return value, velocity


def _bouncing_path(rng: np.random.Generator, spec: ScenarioSpec) -> np.ndarray:
    """(frames, 2) path with piecewise-constant velocity inside the safe band."""
    w, h = spec.width, spec.height
    x_band = (0.1 * w, 0.9 * w)
    y_band = (0.3 * h, 0.7 * h)
    x = rng.uniform(0.3 * w, 0.7 * w)
    y = rng.uniform(0.4 * h, 0.6 * h)
    path = np.zeros((spec.frames, 2))
    until_change = 0
    vx = vy = 0.0
    for f in range(spec.frames):
        if until_change == 0:
            vx = rng.uniform(-spec.max_speed, spec.max_speed)
            vy = rng.uniform(-spec.max_vertical_speed, spec.max_vertical_speed)
            until_change = int(rng.integers(20, 41))
        until_change -= 1
        path[f] = (x, y)
        x, vx = _reflect(x + vx / spec.fps, vx, *x_band)
        y, vy = _reflect(y + vy / spec.fps, vy, *y_band)
    return path


def _seam_path(rng: np.random.Generator, spec: ScenarioSpec) -> np.ndarray:
    w, h = spec.width, spec.height
    speed = rng.uniform(0.5, 1.0) * spec.max_speed + 60.0
    x0 = w - rng.uniform(100.0, 400.0)
    y = rng.uniform(0.4 * h, 0.6 * h)
    frames = np.arange(spec.frames)
    xs = (x0 + speed * frames / spec.fps) % w
    ys = y + 0.05 * h * np.sin(2 * np.pi * frames / (10 * spec.fps))
    return np.column_stack([xs, ys])


def _random_walk(rng: np.random.Generator, spec: ScenarioSpec) -> np.ndarray:
    w, h = spec.width, spec.height
    x = rng.uniform(0, w)
    y = rng.uniform(0.3 * h, 0.7 * h)
    vx = vy = 0.0
    path = np.zeros((spec.frames, 2))
    for f in range(spec.frames):
        path[f] = (x, y)
        vx = 0.95 * vx + rng.normal(0.0, 20.0)
        vy = 0.95 * vy + rng.normal(0.0, 5.0)
        x = (x + vx / spec.fps) % w
        y, vy = _reflect(y + vy / spec.fps, vy, 0.2 * h, 0.8 * h)
    return path


def _to_frame(x: float, y: float, spec: ScenarioSpec) -> EquirectPoint:
    x = float(x) % spec.width
    if x >= spec.width:
        x -= spec.width
    return EquirectPoint(x=x, y=float(min(max(y, 0.0), spec.height - 1.0)))


def generate_synthetic(spec: ScenarioSpec) -> SyntheticTrace:
    """
    Generate viewports and object frames for a scenario.

    Args:
        spec: Scenario parameters

    Returns:
        SyntheticTrace; viewports is the first user's trace
    """
    rng = np.random.default_rng([spec.seed, 0])
    if spec.name == Scenario.SEAM_CROSSER.value:
        objects = [_seam_path(rng, spec)]
    elif spec.name == Scenario.WANDERER.value:
        objects = [_bouncing_path(rng, spec) for _ in range(max(3, spec.distractors))]
    else:
        objects = [_bouncing_path(rng, spec)]
    if spec.name != Scenario.WANDERER.value:
        objects += [_bouncing_path(rng, spec) for _ in range(spec.distractors)]

    object_frames = [
        ObjectFrame(frame=f, coords={i: _to_frame(path[f, 0], path[f, 1], spec) for i, path in enumerate(objects)})
        for f in range(spec.frames)
    ]

    users: Dict[str, List[EquirectPoint]] = {}
    for u in range(spec.users):
        user_rng = np.random.default_rng([spec.seed, u + 1])
        if spec.name == Scenario.WANDERER.value:
            base = _random_walk(user_rng, spec)
        else:
            base = objects[0]
        noise = user_rng.normal(0.0, spec.noise_px, size=base.shape) if spec.noise_px > 0 else np.zeros(base.shape)
        moved = base + noise
        users[f"user{u}"] = [_to_frame(x, y, spec) for x, y in moved]

    return SyntheticTrace(viewports=users["user0"], object_frames=object_frames, users=users)


def detections_from_object_frames(
    object_frames: List[ObjectFrame], width: int, height: int,
    box_width: int = settings.SYNTH_BOX_WIDTH, box_height: int = settings.SYNTH_BOX_HEIGHT,
) -> List[Detection]:
    """Fixed-size boxes around every object, wrap-flagged when a box crosses the seam."""
    detections = []
    for frame in object_frames:
        for object_id in sorted(frame.coords):
            p = frame.coords[object_id]
            x_min = (p.x - box_width / 2.0) % width
            x_max = (p.x + box_width / 2.0) % width
            detections.append(Detection(
                frame=frame.frame,
                x_min=x_min,
                y_min=max(p.y - box_height / 2.0, 0.0),
                x_max=x_max,
                y_max=min(p.y + box_height / 2.0, height - 1.0),
                wrap=x_min > x_max,
            ))
    return detections
