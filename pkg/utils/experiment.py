"""
End-to-end streaming session.

After warm-up every chunk goes through predict, map to tiles, allocate,
score against the actual viewports and observe. The three client-side
phases are timed with perf_counter; network time is not modelled.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from allocators.naba import allocate_naba
from allocators.pyramid import allocate_pyramid
from allocators.tiles import viewport_to_tile
from config.experiment import ExperimentConfig
from core.exceptions import InvalidConfig, InvalidInput, InvalidState
from geometry.projection import EquirectPoint
from metrics.qoe import ChunkRecord, QoeReport, aggregate_qoe
from predictors.base import ObjectFrame, object_frame_at
from predictors.factory import PredictorFactory
from utils import console
from utils.file_utils import PredictionRow

AllocationRow = Tuple[int, int, int, float]


@dataclass(frozen=True)
class ChunkTiming:
    """Wall-clock seconds spent in each phase of one chunk."""

    chunk: int
    update: float
    predict: float
    allocate: float

    @property
    def total(self) -> float:
        return self.update + self.predict + self.allocate


@dataclass
class UserRun:
    user_id: str
    qoe: QoeReport
    predictions: List[PredictionRow] = field(default_factory=list)
    allocations: List[AllocationRow] = field(default_factory=list)
    timings: List[ChunkTiming] = field(default_factory=list)
    mean_object_contribution: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'user_id': self.user_id,
            'qoe': self.qoe.to_dict(),
            'mean_object_contribution': self.mean_object_contribution,
        }


def _mean_or_none(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


@dataclass
class RunReport:
    """Results of one variant over one or more users."""

    variant: str
    config: ExperimentConfig
    users: List[UserRun] = field(default_factory=list)

    @property
    def chunks(self) -> int:
        """Chunks scored, summed over users."""
        return sum(run.qoe.chunks for run in self.users)

    @property
    def mean_tile_error(self) -> Optional[float]:
        """Per-user mean over frames, then mean over users; None without predictions."""
        return _mean_or_none([run.qoe.mean_tile_error for run in self.users])

    @property
    def mean_qoe(self) -> float:
        return float(np.mean([run.qoe.total for run in self.users]))

    @property
    def mean_qoe_per_chunk(self) -> float:
        return float(np.mean([run.qoe.total / run.qoe.chunks for run in self.users]))

    def mean_component(self, name: str) -> float:
        """Mean of q1..q4 over every chunk of every user."""
        return float(np.mean([value for run in self.users for value in getattr(run.qoe, name)]))

    @property
    def mean_object_contribution(self) -> Optional[float]:
        return _mean_or_none([run.mean_object_contribution for run in self.users])

    def latency_summary(self) -> Dict[str, Any]:
        """Mean and max milliseconds per phase over every scored chunk."""
        timings = [t for run in self.users for t in run.timings]
        summary: Dict[str, Any] = {
            'chunks': len(timings),
            'chunk_seconds': self.config.chunk_seconds,
        }
        for phase in ('update', 'predict', 'allocate', 'total'):
            values = np.array([getattr(t, phase) for t in timings]) * 1000.0
            summary[f'mean_{phase}_ms'] = float(values.mean()) if len(values) else 0.0
            summary[f'max_{phase}_ms'] = float(values.max()) if len(values) else 0.0
        return summary

    def to_dict(self) -> Dict[str, Any]:
        """Deterministic summary; timings are left out (see latency_summary)."""
        return {
            'variant': self.variant,
            'config': self.config.to_dict(),
            'users': [run.to_dict() for run in self.users],
            'chunks': self.chunks,
            'mean_tile_error': self.mean_tile_error,
            'mean_qoe': self.mean_qoe,
            'mean_object_contribution': self.mean_object_contribution,
        }


def _check_viewports(viewports: Sequence[EquirectPoint], width: int, height: int) -> None:
    for frame, v in enumerate(viewports):
        if not (0 <= v.x < width and 0 <= v.y < height):
            raise InvalidInput(f"viewport of frame {frame} ({v.x}, {v.y}) is outside the {width}x{height} frame")


def run_session(
    cfg: ExperimentConfig,
    viewports: Sequence[EquirectPoint],
    object_frames: Sequence[Optional[ObjectFrame]],
    user_id: str = "user0",
) -> UserRun:
    """
    Stream one user's session with the configured variant.

    Args:
        cfg: Experiment configuration; cfg.variant selects the predictor
        viewports: Actual viewport of every frame from frame 0
        object_frames: Object centroids per frame; missing frames are empty
        user_id: Label carried into reports

    Returns:
        UserRun with QoE, prediction rows, allocation rows and timings

    Raises:
        InvalidInput: if the viewports do not cover warm-up plus one chunk
            or leave the frame
    """
    cfg.validate()
    warmup, size = cfg.warmup_frames, cfg.chunk_size
    if len(viewports) < warmup + size:
        raise InvalidInput(
            f"user {user_id}: {len(viewports)} frames, need at least {warmup + size} "
            f"(warm-up {warmup} + one chunk of {size})")
    _check_viewports(viewports, cfg.width, cfg.height)

    grid, fov = cfg.grid(), cfg.fov()
    predictor = PredictorFactory.create_predictor(cfg.variant, cfg)
    if predictor is None and cfg.variant != 'naba':
        raise InvalidConfig(f"no predictor registered for variant {cfg.variant!r}")
    if predictor is not None:
        predictor.warmup(viewports[:warmup], object_frames[:warmup])

    chunks = (len(viewports) - warmup) // size
    run = UserRun(user_id=user_id, qoe=QoeReport())
    records: List[ChunkRecord] = []
    contributions: List[Optional[float]] = []
    consumed = warmup

    for chunk in range(chunks):
        start = warmup + chunk * size
        actual = list(viewports[start:start + size])
        objects = [object_frame_at(object_frames, f) for f in range(start, start + size)]

        if predictor is None:
            t0 = time.perf_counter()
            allocation = allocate_naba(grid, cfg.bitrate_mbps)
            t1 = time.perf_counter()
            record = ChunkRecord(chunk=chunk, actual=actual, allocation=allocation, grid=grid, fov=fov)
            timing = ChunkTiming(chunk=chunk, update=0.0, predict=0.0, allocate=t1 - t0)
        else:
            t0 = time.perf_counter()
            prediction = predictor.predict_chunk(objects)
            t1 = time.perf_counter()
            tiles = [viewport_to_tile(v, grid) for v in prediction.viewports]
            allocation = allocate_pyramid(tiles, grid, fov, cfg.bitrate_mbps, centers=prediction.viewports)
            t2 = time.perf_counter()
            predictor.observe_chunk(actual, objects)
            t3 = time.perf_counter()
            record = ChunkRecord(
                chunk=chunk, actual=actual, allocation=allocation, grid=grid, fov=fov, predicted_tiles=tiles)
            timing = ChunkTiming(chunk=chunk, update=t3 - t2, predict=t1 - t0, allocate=t2 - t1)
            for offset, (predicted, seen, contribution) in enumerate(
                    zip(prediction.viewports, actual, prediction.contributions)):
                run.predictions.append(
                    (chunk, start + offset, predicted.x, predicted.y, seen.x, seen.y, contribution))
                contributions.append(contribution)

        records.append(record)
        run.timings.append(timing)
        run.allocations.extend(allocation.rows(chunk))
        consumed += record.frames

    if consumed != warmup + chunks * size or consumed > len(viewports):
        raise InvalidState(f"user {user_id}: consumed {consumed} frames, expected {warmup + chunks * size}")
    if consumed < len(viewports):
        console.detail(f"user {user_id}: {len(viewports) - consumed} trailing frame(s) do not fill a chunk")

    run.qoe = aggregate_qoe(records)
    run.mean_object_contribution = _mean_or_none(contributions)
    return run


def run_experiment(
    cfg: ExperimentConfig,
    viewports: Sequence[EquirectPoint],
    object_frames: Sequence[Optional[ObjectFrame]],
    user_id: str = "user0",
) -> RunReport:
    """Single-user RunReport, see run_session."""
    report = RunReport(variant=cfg.variant, config=cfg)
    report.users.append(run_session(cfg, viewports, object_frames, user_id=user_id))
    return report


def run_users(
    cfg: ExperimentConfig,
    users: Mapping[str, Sequence[EquirectPoint]],
    object_frames: Sequence[Optional[ObjectFrame]],
) -> RunReport:
    """
    Run every user of one video with the same configuration.

    Users are processed in sorted order with their own predictor session.

    Returns:
        RunReport with one UserRun per user
    """
    if not users:
        raise InvalidInput("at least one user trace is required")
    report = RunReport(variant=cfg.variant, config=cfg)
    for user_id in tqdm(sorted(users), desc=f"Users ({cfg.variant})", disable=console.is_quiet() or len(users) < 2):
        report.users.append(run_session(cfg, users[user_id], object_frames, user_id=user_id))
    return report
