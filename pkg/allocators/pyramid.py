"""
Pyramid bitrate allocation for one chunk.

Every tile starts at weight 1. For each frame of the chunk the predicted
viewport tile gains 1 and every other tile at toroidal distance d gains
1 - d / (2 max_d) inside the player FoV or 1 - d / max_d outside it,
with max_d = (m + n) / 2. Bitrates are the normalised weights times B_p.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from allocators.tiles import PlayerFov, Tile, TileGrid, distance_map, fov_mask
from core.exceptions import InvalidInput
from geometry.projection import EquirectPoint


@dataclass(frozen=True, eq=False)
class TileAllocation:
    """Per-tile bitrates (Mbps) of one chunk, summing to total."""

    bitrates: np.ndarray
    total: float

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bitrates.shape

    def at(self, tile: Tile) -> float:
        return float(self.bitrates[tile])

    def rows(self, chunk: int) -> Iterator[Tuple[int, int, int, float]]:
        """(chunk, row, col, bitrate) in row-major order."""
        for (row, col), value in np.ndenumerate(self.bitrates):
            yield (chunk, row, col, float(value))


def pyramid_weights(
    predicted: Sequence[Tile],
    grid: TileGrid,
    fov: PlayerFov,
    centers: Optional[Sequence[EquirectPoint]] = None,
) -> np.ndarray:
    """
    Accumulated pyramid weights for a chunk.

    Args:
        predicted: Predicted viewport tile of every frame
        grid: Tile grid
        fov: Player field of view
        centers: Predicted viewport points, used to place the FoV; tile
            centers are used when omitted

    Returns:
        rows x cols weight matrix
    """
    if len(predicted) == 0:
        raise InvalidInput("pyramid allocation needs at least one predicted frame")
    if centers is not None and len(centers) != len(predicted):
        raise InvalidInput("centers and predicted tiles differ in length")
    max_d = grid.max_distance
    weights = np.ones(grid.shape)
    for index, tile in enumerate(predicted):
        distances = distance_map(tile, grid)
        in_fov = fov_mask(centers[index] if centers is not None else tile, grid, fov)
        # d = 0 gives 1 under both rules, which is the viewport-tile increment
        weights += np.where(in_fov, 1.0 - distances / (2.0 * max_d), 1.0 - distances / max_d)
    return weights


def allocate_pyramid(
    predicted: Sequence[Tile],
    grid: TileGrid,
    fov: PlayerFov,
    bitrate: float,
    centers: Optional[Sequence[EquirectPoint]] = None,
) -> TileAllocation:
    """
    Distribute the preferred bitrate over the tiles of one chunk.

    Args:
        predicted: Predicted viewport tile of every frame of the chunk
        grid: Tile grid
        fov: Player field of view
        bitrate: Preferred chunk bitrate B_p in Mbps
        centers: Optional predicted viewport points for FoV placement

    Returns:
        TileAllocation summing to bitrate
    """
    weights = pyramid_weights(predicted, grid, fov, centers)
    return TileAllocation(bitrates=weights / weights.sum() * bitrate, total=bitrate)
