"""
Tile grid geometry: viewport -> tile mapping, toroidal Manhattan distance
and the set of tiles covered by the player's field of view.
"""

import math
from dataclasses import dataclass
from typing import FrozenSet, Tuple, Union

import numpy as np

from core.exceptions import InvalidConfig
from geometry.projection import EquirectPoint

Tile = Tuple[int, int]


@dataclass(frozen=True)
class TileGrid:
    """rows x cols partition of a width x height frame."""

    rows: int = 8
    cols: int = 8
    width: int = 3840
    height: int = 1920

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidConfig(f"tile grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.width % self.cols or self.height % self.rows:
            raise InvalidConfig(
                f"{self.width}x{self.height} frame is not divisible into {self.rows}x{self.cols} tiles")

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def tile_width(self) -> int:
        return self.width // self.cols

    @property
    def tile_height(self) -> int:
        return self.height // self.rows

    @property
    def max_distance(self) -> float:
        """Largest toroidal Manhattan distance between two tiles, (m + n) / 2."""
        return (self.rows + self.cols) / 2.0

    def tile_center(self, tile: Tile) -> EquirectPoint:
        row, col = tile
        return EquirectPoint(x=(col + 0.5) * self.tile_width, y=(row + 0.5) * self.tile_height)


@dataclass(frozen=True)
class PlayerFov:
    """Media player viewport in pixels."""

    width: int = 600
    height: int = 300

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidConfig(f"player dimensions must be positive, got {self.width}x{self.height}")

    def check_fits(self, grid: TileGrid) -> None:
        if self.width > grid.width or self.height > grid.height:
            raise InvalidConfig(
                f"player {self.width}x{self.height} is larger than the {grid.width}x{grid.height} frame")


def viewport_to_tile(v: EquirectPoint, grid: TileGrid) -> Tile:
    """(floor(y / tile_height), floor(x / tile_width)), clamped into the grid."""
    row = min(max(int(math.floor(v.y / grid.tile_height)), 0), grid.rows - 1)
    col = min(max(int(math.floor(v.x / grid.tile_width)), 0), grid.cols - 1)
    return (row, col)


def _axis_distance(a, b, size: int):
    delta = np.abs(np.asarray(a) - np.asarray(b)) % size
    return np.minimum(delta, size - delta)


def tile_distance(a: Tile, b: Tile, grid: TileGrid) -> int:
    """Manhattan distance with wrap-around on both axes."""
    return int(_axis_distance(a[0], b[0], grid.rows) + _axis_distance(a[1], b[1], grid.cols))


def distance_map(tile: Tile, grid: TileGrid) -> np.ndarray:
    """rows x cols matrix of tile_distance from tile to every tile."""
    row_distance = _axis_distance(np.arange(grid.rows), tile[0], grid.rows)
    col_distance = _axis_distance(np.arange(grid.cols), tile[1], grid.cols)
    return np.add.outer(row_distance, col_distance)


def fov_mask(center: Union[Tile, EquirectPoint], grid: TileGrid, fov: PlayerFov) -> np.ndarray:
    """
    Boolean rows x cols mask of tiles overlapping the player rectangle.

    The rectangle is centered on the viewport point, or on the tile center
    when a tile is given. It wraps horizontally and is clamped vertically;
    a tile counts only with positive-area overlap.
    """
    point = center if isinstance(center, EquirectPoint) else grid.tile_center(center)
    mask = np.zeros(grid.shape, dtype=bool)

    x0 = point.x - fov.width / 2.0
    x1 = point.x + fov.width / 2.0
    y0 = max(point.y - fov.height / 2.0, 0.0)
    y1 = min(point.y + fov.height / 2.0, float(grid.height))
    if y1 <= y0:
        return mask

    first_row = int(math.floor(y0 / grid.tile_height))
    last_row = min(int(math.ceil(y1 / grid.tile_height)) - 1, grid.rows - 1)
    first_col = int(math.floor(x0 / grid.tile_width))
    last_col = int(math.ceil(x1 / grid.tile_width)) - 1
    rows = list(range(first_row, last_row + 1))
    cols = sorted({k % grid.cols for k in range(first_col, last_col + 1)})
    mask[np.ix_(rows, cols)] = True
    return mask


def fov_tiles(center: Union[Tile, EquirectPoint], grid: TileGrid, fov: PlayerFov) -> FrozenSet[Tile]:
    """Tiles overlapping the player rectangle, see fov_mask."""
    return frozenset((int(r), int(c)) for r, c in np.argwhere(fov_mask(center, grid, fov)))
