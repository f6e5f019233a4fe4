"""
Quality-of-experience metrics.

Per chunk c with f_c frames and n_c distinct actual viewport tiles:
  Q1  viewport bitrate level: sum over frames of the mean bitrate of the
      FoV tiles around the actual viewport, divided by n_c
  Q2  intra-frame variation: sum over frames of the population stddev of
      those FoV bitrates, divided by n_c
  Q3  intra-chunk variation: stddev over frames of the per-frame mean, / n_c
  Q4  inter-chunk variation: |Q1(c) - Q1(c-1)|
Aggregate Q = sum_c (Q1 - Q2 - Q3) - sum_{c >= 2} Q4.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from allocators.pyramid import TileAllocation
from allocators.tiles import PlayerFov, Tile, TileGrid, fov_mask, tile_distance, viewport_to_tile
from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint


@dataclass(frozen=True)
class ChunkRecord:
    """Actual viewports of one chunk with the allocation it was streamed at."""

    chunk: int
    actual: Sequence[EquirectPoint]
    allocation: TileAllocation
    grid: TileGrid
    fov: PlayerFov
    predicted_tiles: Optional[Sequence[Tile]] = None

    def __post_init__(self):
        if len(self.actual) < 1:
            raise InvalidInput(f"chunk {self.chunk} has no frames")
        if self.allocation.shape != self.grid.shape:
            raise InvalidInput(f"allocation shape {self.allocation.shape} does not match grid {self.grid.shape}")
        if self.predicted_tiles is not None and len(self.predicted_tiles) != len(self.actual):
            raise InvalidInput(f"chunk {self.chunk} has {len(self.predicted_tiles)} predictions for {len(self.actual)} frames")

    @property
    def frames(self) -> int:
        return len(self.actual)

    @property
    def actual_tiles(self) -> List[Tile]:
        return [viewport_to_tile(v, self.grid) for v in self.actual]

    @property
    def distinct_tiles(self) -> int:
        """n_c: number of distinct actual viewport-center tiles."""
        return len(set(self.actual_tiles))


@dataclass
class QoeReport:
    q1: List[float] = field(default_factory=list)
    q2: List[float] = field(default_factory=list)
    q3: List[float] = field(default_factory=list)
    q4: List[float] = field(default_factory=list)
    total: float = 0.0
    mean_tile_error: Optional[float] = None

    @property
    def chunks(self) -> int:
        return len(self.q1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'chunks': self.chunks,
            'q1': self.q1,
            'q2': self.q2,
            'q3': self.q3,
            'q4': self.q4,
            'qoe': self.total,
            'mean_tile_error': self.mean_tile_error,
        }


def manhattan_tile_error(actual: Tile, predicted: Tile, grid: TileGrid) -> int:
    """Toroidal Manhattan distance between actual and predicted tile."""
    return tile_distance(actual, predicted, grid)


def _fov_bitrates(rec: ChunkRecord) -> List[np.ndarray]:
    return [rec.allocation.bitrates[fov_mask(v, rec.grid, rec.fov)] for v in rec.actual]


def _frame_means(rec: ChunkRecord) -> np.ndarray:
    return np.array([rates.mean() for rates in _fov_bitrates(rec)])


def q1(rec: ChunkRecord) -> float:
    """Average viewport bitrate, Mbps."""
    return float(_frame_means(rec).sum() / rec.distinct_tiles)


def q2(rec: ChunkRecord) -> float:
    """Bitrate variation inside the viewport, Mbps."""
    return float(sum(np.std(rates) for rates in _fov_bitrates(rec)) / rec.distinct_tiles)


def q3(rec: ChunkRecord) -> float:
    """Variation of the viewport bitrate across the frames of the chunk, Mbps."""
    return float(np.std(_frame_means(rec)) / rec.distinct_tiles)


def q4(q1_current: float, q1_previous: float) -> float:
    """Variation of the viewport bitrate between successive chunks, Mbps."""
    return abs(q1_current - q1_previous)


def mean_tile_error(records: Sequence[ChunkRecord]) -> Optional[float]:
    """Mean Manhattan tile error over all frames with a prediction, None if there are none."""
    errors = [
        manhattan_tile_error(actual, predicted, rec.grid)
        for rec in records if rec.predicted_tiles is not None
        for actual, predicted in zip(rec.actual_tiles, rec.predicted_tiles)
    ]
    return float(np.mean(errors)) if errors else None


def aggregate_qoe(records: Sequence[ChunkRecord]) -> QoeReport:
    """
    Per-chunk Q1..Q4 and the aggregate Q over a session.

    Q4 of the first chunk is reported as 0 and is not part of the sum.
    """
    if not records:
        raise InvalidInput("QoE needs at least one chunk")
    report = QoeReport()
    for index, rec in enumerate(records):
        report.q1.append(q1(rec))
        report.q2.append(q2(rec))
        report.q3.append(q3(rec))
        report.q4.append(q4(report.q1[index], report.q1[index - 1]) if index else 0.0)
    report.total = float(
        sum(a - b - c for a, b, c in zip(report.q1, report.q2, report.q3)) - sum(report.q4[1:]))
    report.mean_tile_error = mean_tile_error(records)
    return report
