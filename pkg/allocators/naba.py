import numpy as np

from allocators.pyramid import TileAllocation
from allocators.tiles import TileGrid


def allocate_naba(grid: TileGrid, bitrate: float) -> TileAllocation:
    """Non-adaptive baseline: every tile gets bitrate / (m * n)."""
    return TileAllocation(bitrates=np.full(grid.shape, bitrate / (grid.rows * grid.cols)), total=bitrate)
