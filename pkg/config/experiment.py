from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Tuple

from allocators.tiles import PlayerFov, TileGrid
from config.settings import settings
from core.exceptions import InvalidConfig, StreamingError
from timeseries.arima import ArimaOrder
from tracking.tracker import TrackerConfig


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one streaming run depends on. Defaults come from settings."""

    width: int = settings.FRAME_WIDTH
    height: int = settings.FRAME_HEIGHT
    fps: int = settings.FPS
    chunk_seconds: float = settings.CHUNK_SECONDS
    warmup_seconds: float = settings.WARMUP_SECONDS
    tile_rows: int = settings.TILE_ROWS
    tile_cols: int = settings.TILE_COLS
    player_width: int = settings.PLAYER_WIDTH
    player_height: int = settings.PLAYER_HEIGHT
    bitrate_mbps: float = settings.PREFERRED_BITRATE_MBPS
    order_x: str = settings.ARIMA_ORDER_X
    order_y: str = settings.ARIMA_ORDER_Y
    pa_c: float = settings.PA_C
    pa_epsilon: float = settings.PA_EPSILON
    pa_alpha: float = settings.PA_ALPHA
    pa_normalize: bool = settings.PA_NORMALIZE
    pa_residual: bool = settings.PA_RESIDUAL
    deactivate_after: int = settings.TRACKER_DEACTIVATE_AFTER
    max_match_angle: float = settings.TRACKER_MAX_MATCH_ANGLE
    seed: int = settings.SEED
    variant: str = settings.DEFAULT_VARIANT

    @classmethod
    def from_settings(cls, **overrides) -> "ExperimentConfig":
        """Build from settings, apply non-None overrides and validate."""
        return cls().with_overrides(**overrides)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """
        Copy with the given fields replaced.

        None values are ignored so CLI options that were not passed keep
        their defaults.

        Returns:
            Validated configuration
        """
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(changes) - set(self.__dataclass_fields__)
        if unknown:
            raise InvalidConfig(f"unknown configuration fields: {', '.join(sorted(unknown))}")
        updated = replace(self, **changes)
        updated.validate()
        return updated

    @property
    def chunk_size(self) -> int:
        return int(round(self.fps * self.chunk_seconds))

    @property
    def warmup_frames(self) -> int:
        return int(round(self.fps * self.warmup_seconds))

    @property
    def arima_order_x(self) -> ArimaOrder:
        return ArimaOrder.parse(self.order_x)

    @property
    def arima_order_y(self) -> ArimaOrder:
        return ArimaOrder.parse(self.order_y)

    def grid(self) -> TileGrid:
        return TileGrid(rows=self.tile_rows, cols=self.tile_cols, width=self.width, height=self.height)

    def fov(self) -> PlayerFov:
        return PlayerFov(width=self.player_width, height=self.player_height)

    def tracker_config(self) -> TrackerConfig:
        return TrackerConfig(deactivate_after=self.deactivate_after, max_match_angle=self.max_match_angle)

    def validate(self) -> None:
        """
        Reject inconsistent configurations.

        Raises:
            InvalidConfig: describing the first violated rule
        """
        if self.width <= 0 or self.height <= 0 or self.width != 2 * self.height:
            raise InvalidConfig(f"frame must be 2:1 with positive size, got {self.width}x{self.height}")
        try:
            self.fov().check_fits(self.grid())
            self.tracker_config()
            orders = (self.arima_order_x, self.arima_order_y)
        except InvalidConfig:
            raise
        except StreamingError as e:
            raise InvalidConfig(e.message)
        if self.fps < 1:
            raise InvalidConfig(f"fps must be >= 1, got {self.fps}")
        if self.chunk_size < 1:
            raise InvalidConfig(f"chunk of {self.chunk_seconds}s is shorter than one frame")
        if self.warmup_frames < self.chunk_size:
            raise InvalidConfig("warm-up must cover at least one chunk")
        for order in orders:
            if self.chunk_size < order.min_observations:
                raise InvalidConfig(
                    f"chunk of {self.chunk_size} frames is too short for ARIMA{order} "
                    f"(needs {order.min_observations})")
        if self.pa_c <= 0:
            raise InvalidConfig(f"PA aggressiveness C must be positive, got {self.pa_c}")
        if self.pa_epsilon < 0:
            raise InvalidConfig(f"PA epsilon must be >= 0, got {self.pa_epsilon}")
        if self.pa_alpha <= 0:
            raise InvalidConfig(f"PA alpha must be positive, got {self.pa_alpha}")
        if self.seed < 0:
            raise InvalidConfig(f"seed must be >= 0, got {self.seed}")
        if self.bitrate_mbps < 0:
            raise InvalidConfig(f"bitrate must be >= 0, got {self.bitrate_mbps}")
        if self.variant not in settings.VARIANTS:
            raise InvalidConfig(f"unknown variant {self.variant!r}, expected one of {settings.VARIANTS}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def dims(self) -> Tuple[int, int]:
        return (self.width, self.height)
