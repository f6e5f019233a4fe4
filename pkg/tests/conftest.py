import os
import sys

import pytest

# Add project root to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.experiment import ExperimentConfig
from utils import console


@pytest.fixture(autouse=True)
def quiet_console():
    console.set_quiet(True)
    yield
    console.set_quiet(False)


@pytest.fixture
def cfg():
    """Default configuration, independent of any .env in the working directory."""
    return ExperimentConfig(
        width=3840, height=1920, fps=30, chunk_seconds=1.0, warmup_seconds=5.0,
        tile_rows=8, tile_cols=8, player_width=600, player_height=300, bitrate_mbps=8.0,
        order_x="2,1,1", order_y="3,1,0", pa_c=0.01, pa_epsilon=0.001, pa_alpha=1.0,
        pa_normalize=False, pa_residual=True, deactivate_after=30, seed=0, variant="parima",
    )
