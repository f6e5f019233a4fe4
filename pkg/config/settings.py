import math
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _float_list(value: str):
    return [float(item) for item in value.split(",") if item.strip()]


class Settings:
    """Application settings and configuration."""

    # Frame Settings (equirectangular, width must be 2 x height)
    FRAME_WIDTH = int(os.getenv("FRAME_WIDTH", "3840"))
    FRAME_HEIGHT = int(os.getenv("FRAME_HEIGHT", "1920"))

    # Tiling and player
    TILE_ROWS = int(os.getenv("TILE_ROWS", "8"))
    TILE_COLS = int(os.getenv("TILE_COLS", "8"))
    PLAYER_WIDTH = int(os.getenv("PLAYER_WIDTH", "600"))
    PLAYER_HEIGHT = int(os.getenv("PLAYER_HEIGHT", "300"))

    # Streaming Settings
    PREFERRED_BITRATE_MBPS = float(os.getenv("PREFERRED_BITRATE_MBPS", "8.0"))
    FPS = int(os.getenv("FPS", "30"))
    CHUNK_SECONDS = float(os.getenv("CHUNK_SECONDS", "1.0"))
    WARMUP_SECONDS = float(os.getenv("WARMUP_SECONDS", "5.0"))

    # Model Settings
    # ARIMA orders as "p,d,q"
    ARIMA_ORDER_X = os.getenv("ARIMA_ORDER_X", "2,1,1")
    ARIMA_ORDER_Y = os.getenv("ARIMA_ORDER_Y", "3,1,0")
    PA_C = float(os.getenv("PA_C", "0.01"))
    PA_EPSILON = float(os.getenv("PA_EPSILON", "0.001"))
    PA_ALPHA = float(os.getenv("PA_ALPHA", "1.0"))
    PA_NORMALIZE = os.getenv("PA_NORMALIZE", "false").lower() == "true"
    # PARIMA fits the error of the ARIMA forecast from object offsets
    PA_RESIDUAL = os.getenv("PA_RESIDUAL", "true").lower() == "true"

    # Tracker Settings
    TRACKER_DEACTIVATE_AFTER = int(os.getenv("TRACKER_DEACTIVATE_AFTER", "30"))
    TRACKER_MAX_MATCH_ANGLE = float(os.getenv("TRACKER_MAX_MATCH_ANGLE", str(math.pi)))

    # Experiment Settings
    SEED = int(os.getenv("SEED", "0"))
    VARIANTS = ['parima', 'arima_only', 'pa_only', 'naba']
    DEFAULT_VARIANT = os.getenv("DEFAULT_VARIANT", "parima")
    DEFAULT_VARIANTS = os.getenv("DEFAULT_VARIANTS", ",".join(VARIANTS)).split(",")
    CHUNK_SWEEP_SECONDS = _float_list(os.getenv("CHUNK_SWEEP_SECONDS", "0.5,1.0,1.5,2.0"))
    TRACE_GAP_WARNING_SECONDS = float(os.getenv("TRACE_GAP_WARNING_SECONDS", "1.0"))

    # Synthetic scenario settings
    SYNTH_DURATION_SECONDS = float(os.getenv("SYNTH_DURATION_SECONDS", "60"))
    SYNTH_NOISE_PX = float(os.getenv("SYNTH_NOISE_PX", "4.0"))
    SYNTH_BOX_WIDTH = int(os.getenv("SYNTH_BOX_WIDTH", "120"))
    SYNTH_BOX_HEIGHT = int(os.getenv("SYNTH_BOX_HEIGHT", "80"))

    # Output Settings
    DEFAULT_OUTPUT_DIR = os.getenv("DEFAULT_OUTPUT_DIR", "output")
    SCHEMA_VERSION = os.getenv("SCHEMA_VERSION", "1.0")
    MANIFEST_FILE = "manifest.json"
    DETECTIONS_FILE = "detections.csv"
    TRAJECTORIES_FILE = "trajectories.csv"
    VIEWPORTS_FILE = "viewports.csv"
    PREDICTIONS_FILE = "predictions.csv"
    ALLOCATIONS_FILE = "allocations.csv"
    QOE_FILE = "qoe.json"
    COMPARISON_CSV_FILE = "comparison.csv"
    COMPARISON_JSON_FILE = "comparison.json"
    SWEEP_FILE = "sweep.csv"
    LATENCY_FILE = "latency.json"

    # CSV Templates (header rows of every artifact)
    DETECTIONS_HEADER = ['frame', 'x_min', 'y_min', 'x_max', 'y_max', 'wrap']
    TRAJECTORIES_HEADER = ['frame', 'object_id', 'cx', 'cy']
    VIEWPORTS_HEADER = ['frame', 'x', 'y']
    HEAD_TRACE_HEADER = ['timestamp', 'w', 'x', 'y', 'z']
    PREDICTIONS_HEADER = ['chunk', 'frame', 'pred_x', 'pred_y', 'actual_x', 'actual_y', 'obj_contrib']
    ALLOCATIONS_HEADER = ['chunk', 'row', 'col', 'bitrate_mbps']
    COMPARISON_HEADER = [
        'variant', 'users', 'chunks', 'mean_tile_error', 'mean_qoe',
        'mean_q1', 'mean_q2', 'mean_q3', 'mean_q4', 'mean_object_contribution',
    ]
    SWEEP_HEADER = [
        'chunk_seconds', 'chunk_size', 'chunks', 'mean_qoe', 'qoe_per_chunk', 'mean_tile_error',
    ]


# Global settings instance
settings = Settings()
