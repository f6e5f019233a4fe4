from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import InsufficientData, InvalidInput, InvalidState
from geometry.projection import EquirectPoint
from predictors.passive_aggressive import (
    PaHyper,
    PaModel,
    object_contribution,
    pa_predict,
    pa_update,
    residual_contribution,
)
from timeseries.arima import ArimaOrder, fit, forecast
from timeseries.transforms import apply_transforms, invert_forecast
from utils import console

ObjectMap = Dict[int, float]


@dataclass(frozen=True)
class ObjectFrame:
    """Object centroids visible in one frame."""

    frame: int
    coords: Mapping[int, EquirectPoint] = field(default_factory=dict)


def object_frame_at(frames: Sequence[Optional[ObjectFrame]], frame: int) -> ObjectFrame:
    """frames[frame], or an empty ObjectFrame when there is no data for it."""
    if 0 <= frame < len(frames) and frames[frame] is not None:
        return frames[frame]
    return ObjectFrame(frame=frame)


def object_frames_from_rows(
    rows: Iterable[Tuple[int, int, float, float]],
    n_frames: Optional[int] = None,
    frame_dims: Optional[Tuple[int, int]] = None,
) -> List[ObjectFrame]:
    """
    Dense per-frame object maps from (frame, object_id, cx, cy) rows.

    Args:
        rows: Trajectory rows
        n_frames: Length of the result; defaults to the last frame + 1
        frame_dims: (width, height); when given every centroid must lie
            in [0, width) x [0, height)

    Returns:
        List where index f holds the ObjectFrame of frame f

    Raises:
        InvalidInput: on a negative frame, a non-finite centroid or a
            centroid outside the frame
    """
    by_frame: Dict[int, Dict[int, EquirectPoint]] = {}
    for frame, object_id, cx, cy in rows:
        cx, cy = float(cx), float(cy)
        if int(frame) < 0:
            raise InvalidInput(f"object {object_id}: negative frame {frame}")
        if not (np.isfinite(cx) and np.isfinite(cy)):
            raise InvalidInput(f"object {object_id} at frame {frame}: non-finite centroid ({cx}, {cy})")
        if frame_dims is not None and not (0.0 <= cx < frame_dims[0] and 0.0 <= cy < frame_dims[1]):
            raise InvalidInput(
                f"object {object_id} at frame {frame}: centroid ({cx}, {cy}) outside the "
                f"{frame_dims[0]}x{frame_dims[1]} frame")
        by_frame.setdefault(int(frame), {})[int(object_id)] = EquirectPoint(x=cx, y=cy)
    if n_frames is None:
        n_frames = max(by_frame) + 1 if by_frame else 0
    return [ObjectFrame(frame=f, coords=by_frame.get(f, {})) for f in range(n_frames)]


def tracks_to_object_frames(tracks, n_frames: Optional[int] = None) -> List[ObjectFrame]:
    """Same as object_frames_from_rows for tracker output (ObjectTrack list)."""
    rows = [(frame, track.id, point.x, point.y) for track in tracks for frame, point in track.points]
    return object_frames_from_rows(rows, n_frames)


@dataclass
class PredictorSession:
    """
    State of one user's online predictor.

    history holds the actual viewports of the previous chunk; pending the
    intermediate viewports of the chunk predicted last, consumed when the
    actual viewports of that chunk are observed. residual makes the PARIMA
    models fit the error of the intermediate viewport from object offsets;
    object_gate is the (width, height) window around the intermediate
    outside which objects are ignored in that mode.
    """

    pa_x: PaModel
    pa_y: PaModel
    fps: int
    chunk_size: int
    frame_dims: Tuple[int, int]
    warmup: int
    order_x: ArimaOrder = field(default_factory=lambda: ArimaOrder(2, 1, 1))
    order_y: ArimaOrder = field(default_factory=lambda: ArimaOrder(3, 1, 0))
    seed: int = 0
    normalize: bool = False
    residual: bool = True
    object_gate: Optional[Tuple[float, float]] = None
    history: List[EquirectPoint] = field(default_factory=list)
    chunk_index: int = 0
    warmed_up: bool = False
    pending: Optional[List[Tuple[float, float]]] = None

    def __post_init__(self):
        if self.chunk_size < 1:
            raise InvalidInput(f"chunk size must be >= 1, got {self.chunk_size}")
        if self.warmup < self.chunk_size:
            raise InvalidInput("warm-up must cover at least one chunk")

    @classmethod
    def from_config(cls, cfg) -> "PredictorSession":
        hyper = PaHyper(c=cfg.pa_c, epsilon=cfg.pa_epsilon, alpha=cfg.pa_alpha)
        return cls(
            pa_x=PaModel(hyper=hyper),
            pa_y=PaModel(hyper=hyper),
            fps=cfg.fps,
            chunk_size=cfg.chunk_size,
            frame_dims=cfg.dims(),
            warmup=cfg.warmup_frames,
            order_x=cfg.arima_order_x,
            order_y=cfg.arima_order_y,
            seed=cfg.seed,
            normalize=cfg.pa_normalize,
            residual=cfg.pa_residual,
            object_gate=(float(cfg.player_width), float(cfg.player_height)),
        )

    @property
    def width(self) -> int:
        return self.frame_dims[0]

    @property
    def height(self) -> int:
        return self.frame_dims[1]


@dataclass
class ChunkPrediction:
    chunk: int
    start_frame: int
    viewports: List[EquirectPoint]
    intermediates: List[Tuple[float, float]]
    contributions: List[Optional[float]]


def nearest_representative(value: float, anchor: float, width: float) -> float:
    """value + k * width closest to anchor."""
    return value + float(np.rint((anchor - value) / width)) * width


class BasePredictor(ABC):
    """Base class for all per-chunk viewport predictors."""

    # Whether observed viewports train the PA models
    trains_pa = True

    def __init__(self, session: PredictorSession):
        self.session = session

    @classmethod
    def from_config(cls, cfg) -> "BasePredictor":
        return cls(PredictorSession.from_config(cfg))

    @abstractmethod
    def get_name(self) -> str:
        """
        Get predictor name.

        Returns:
            Variant name
        """
        pass

    @abstractmethod
    def _predict_frames(
        self, objects: List[Tuple[ObjectMap, ObjectMap]]
    ) -> Tuple[List[Tuple[float, float]], List[Tuple[float, float]], List[Optional[float]]]:
        """
        Raw predictions for the next chunk.

        Args:
            objects: Per-frame (x map, y map) of object coordinates in pixels

        Returns:
            (raw predictions before wrapping, intermediate viewports,
            per-frame object contribution or None)
        """
        pass

    # Feature handling

    def _scales(self) -> Tuple[float, float]:
        s = self.session
        return (float(s.width), float(s.height)) if s.normalize else (1.0, 1.0)

    def _object_maps(self, objects: Sequence[Optional[ObjectFrame]]) -> List[Tuple[ObjectMap, ObjectMap]]:
        maps = []
        for index in range(self.session.chunk_size):
            frame = objects[index] if index < len(objects) else None
            coords = frame.coords if frame is not None else {}
            maps.append(({k: p.x for k, p in coords.items()}, {k: p.y for k, p in coords.items()}))
        return maps

    def fits_residual(self) -> bool:
        """Whether the PA models fit the error of the intermediate viewport."""
        return False

    def _features(
        self, inter_x: float, inter_y: float, objs_x: ObjectMap, objs_y: ObjectMap
    ) -> Tuple[Tuple[float, ObjectMap], Tuple[float, ObjectMap]]:
        """
        Scaled (intermediate, objects) features of one frame, x axis first.

        In residual mode the intermediate is the origin, so its own feature
        is 0 and each object becomes its offset from the intermediate (x
        unwrapped to the nearest copy). Objects outside the gate window
        centered on the intermediate are dropped.
        """
        s = self.session
        sx, sy = self._scales()
        if not self.fits_residual():
            return ((inter_x / sx, {k: v / sx for k, v in objs_x.items()}),
                    (inter_y / sy, {k: v / sy for k, v in objs_y.items()}))
        offsets_x: ObjectMap = {}
        offsets_y: ObjectMap = {}
        for object_id, ox in objs_x.items():
            dx = nearest_representative(ox, inter_x, s.width) - inter_x
            dy = objs_y[object_id] - inter_y
            if s.object_gate is not None and (abs(dx) > s.object_gate[0] / 2 or abs(dy) > s.object_gate[1] / 2):
                continue
            offsets_x[object_id] = dx / sx
            offsets_y[object_id] = dy / sy
        return (0.0, offsets_x), (0.0, offsets_y)

    def _contribution(self, inter_x: float, features_x: Tuple[float, ObjectMap]) -> float:
        sx, _ = self._scales()
        if self.fits_residual():
            return residual_contribution(self.session.pa_x, inter_x / sx, features_x[1])
        return object_contribution(self.session.pa_x, *features_x)

    def _pa_frame(self, inter_x: float, inter_y: float, objs_x: ObjectMap, objs_y: ObjectMap) -> Tuple[float, float, float]:
        """PA prediction for one frame in pixels plus the x object contribution."""
        s = self.session
        sx, sy = self._scales()
        features_x, features_y = self._features(inter_x, inter_y, objs_x, objs_y)
        px = pa_predict(s.pa_x, *features_x) * sx
        py = pa_predict(s.pa_y, *features_y) * sy
        if self.fits_residual():
            px, py = px + inter_x, py + inter_y
        return px, py, self._contribution(inter_x, features_x)

    def _train_frame(self, inter_x: float, inter_y: float, objs_x: ObjectMap, objs_y: ObjectMap, actual: EquirectPoint) -> None:
        s = self.session
        sx, sy = self._scales()
        features_x, features_y = self._features(inter_x, inter_y, objs_x, objs_y)
        # compare the target on the unwrapped scale of the intermediate
        target_x = nearest_representative(actual.x, inter_x, s.width)
        target_y = actual.y
        if self.fits_residual():
            target_x, target_y = target_x - inter_x, target_y - inter_y
        s.pa_x = pa_update(s.pa_x, *features_x, target_x / sx)
        s.pa_y = pa_update(s.pa_y, *features_y, target_y / sy)

    def _to_frame(self, x: float, y: float) -> EquirectPoint:
        s = self.session
        x = x % s.width
        if x >= s.width:
            x -= s.width
        return EquirectPoint(x=x, y=min(max(y, 0.0), s.height - 1.0))

    def arima_intermediates(self) -> List[Tuple[float, float]]:
        """
        Intermediate viewports for the next chunk.

        Fresh ARIMA models are fitted on the transformed actual viewports
        of the previous chunk and forecast chunk_size frames ahead.
        """
        s = self.session
        xs = [p.x for p in s.history]
        ys = [p.y for p in s.history]
        tx, chain_x = apply_transforms(xs, s.width, [s.seed, s.chunk_index, 0], horizontal=True)
        ty, chain_y = apply_transforms(ys, s.width, [s.seed, s.chunk_index, 1], horizontal=False)
        model_x, model_y = fit(tx, s.order_x), fit(ty, s.order_y)
        for axis, model in (("x", model_x), ("y", model_y)):
            if model.ma_dropped:
                console.warn(f"chunk {s.chunk_index}: singular ARIMA{model.order} fit on {axis}, MA terms dropped")
        inter_x = invert_forecast(forecast(model_x, s.chunk_size), chain_x, s.width)
        inter_y = invert_forecast(forecast(model_y, s.chunk_size), chain_y, s.width)
        return [(float(x), float(y)) for x, y in zip(inter_x, inter_y)]

    # Session lifecycle

    def warmup(self, actual: Sequence[EquirectPoint], objects: Sequence[Optional[ObjectFrame]]) -> PredictorSession:
        """
        Train on the first warm-up frames, using the previous actual
        viewport as the intermediate feature of every frame.

        Args:
            actual: Actual viewports from frame 0 (at least session.warmup)
            objects: Object frames aligned with actual

        Returns:
            The warmed-up session

        Raises:
            InvalidState: if the session was already warmed up
            InsufficientData: if fewer than session.warmup frames are given
        """
        s = self.session
        if s.warmed_up:
            raise InvalidState("session is already warmed up")
        if len(actual) < s.warmup:
            raise InsufficientData(f"warm-up needs {s.warmup} frames, got {len(actual)}")
        if self.trains_pa:
            for f in range(1, s.warmup):
                frame = objects[f] if f < len(objects) else None
                coords = frame.coords if frame is not None else {}
                previous = actual[f - 1]
                self._train_frame(
                    previous.x, previous.y,
                    {k: p.x for k, p in coords.items()}, {k: p.y for k, p in coords.items()},
                    actual[f],
                )
        s.history = list(actual[s.warmup - s.chunk_size:s.warmup])
        s.warmed_up = True
        return s

    def predict_chunk(self, objects: Sequence[Optional[ObjectFrame]]) -> ChunkPrediction:
        """
        Predict the viewports of the next chunk.

        Args:
            objects: Object frames of the chunk; missing frames count as empty

        Returns:
            ChunkPrediction with x wrapped into [0, width) and y clamped
            into [0, height - 1]
        """
        s = self.session
        if not s.warmed_up:
            raise InvalidState("predict_chunk called before warmup")
        raw, intermediates, contributions = self._predict_frames(self._object_maps(objects))
        s.pending = intermediates
        return ChunkPrediction(
            chunk=s.chunk_index,
            start_frame=s.warmup + s.chunk_index * s.chunk_size,
            viewports=[self._to_frame(x, y) for x, y in raw],
            intermediates=intermediates,
            contributions=contributions,
        )

    def observe_chunk(self, actual: Sequence[EquirectPoint], objects: Sequence[Optional[ObjectFrame]]) -> PredictorSession:
        """
        Learn from the actual viewports of the chunk predicted last.

        Frames are applied in order; history becomes this chunk.

        Raises:
            InvalidState: if no chunk is pending
            InvalidInput: if len(actual) != chunk_size
        """
        s = self.session
        if s.pending is None:
            raise InvalidState("observe_chunk called without a predicted chunk")
        if len(actual) != s.chunk_size:
            raise InvalidInput(f"expected {s.chunk_size} actual viewports, got {len(actual)}")
        if self.trains_pa:
            for (inter_x, inter_y), (objs_x, objs_y), point in zip(s.pending, self._object_maps(objects), actual):
                self._train_frame(inter_x, inter_y, objs_x, objs_y, point)
        s.history = list(actual)
        s.chunk_index += 1
        s.pending = None
        return s

    def object_contribution(self, objects: ObjectFrame, intermediate: Tuple[float, float]) -> float:
        """
        x-axis object contribution the current models give one frame.

        Args:
            objects: Objects of the frame
            intermediate: (x, y) intermediate viewport of the frame

        Returns:
            Fraction in [0, 1], see passive_aggressive.object_contribution
        """
        inter_x, inter_y = intermediate
        features_x, _ = self._features(
            inter_x, inter_y, {k: p.x for k, p in objects.coords.items()}, {k: p.y for k, p in objects.coords.items()})
        return self._contribution(inter_x, features_x)
