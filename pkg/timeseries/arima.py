"""
ARIMA(p, d, q) fit and forecast.

Estimation is Hannan-Rissanen: a long autoregression estimates the
innovations, then one least-squares pass regresses the differenced series
on an intercept, p lags and q lagged innovations.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from core.exceptions import InsufficientData, InvalidInput

MAX_LONG_AR_ORDER = 10
# Forecast increments are clipped to this multiple of the largest observed one
CLIP_FACTOR = 10.0
RECOMMENDED_OBSERVATIONS = 30


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise InvalidInput(f"ARIMA orders must be non-negative, got {self}")
        if self.p + self.q == 0 and self.d == 0:
            raise InvalidInput("ARIMA(0, 0, 0) does nothing")

    @classmethod
    def parse(cls, text: str) -> "ArimaOrder":
        """Parse "p,d,q"."""
        try:
            p, d, q = (int(part) for part in text.replace("(", "").replace(")", "").split(","))
        except ValueError:
            raise InvalidInput(f"ARIMA order must look like 'p,d,q', got {text!r}")
        return cls(p, d, q)

    @property
    def min_observations(self) -> int:
        """Hard lower bound on series length accepted by fit()."""
        return 3 * (self.p + self.q) + self.d + 2

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.p, self.d, self.q)

    def __str__(self):
        return f"({self.p}, {self.d}, {self.q})"


def _empty() -> np.ndarray:
    return np.zeros(0)


@dataclass(frozen=True, eq=False)
class ArimaModel:
    """
    Fitted model plus the trailing state needed to forecast.

    last_values holds the last p differenced observations, last_residuals
    the last q innovations, level_tails the last value of each of the d
    integration levels (undifferenced series first).
    """

    order: ArimaOrder
    ar: np.ndarray = field(default_factory=_empty)
    ma: np.ndarray = field(default_factory=_empty)
    intercept: float = 0.0
    last_values: np.ndarray = field(default_factory=_empty)
    last_residuals: np.ndarray = field(default_factory=_empty)
    level_tails: Tuple[float, ...] = ()
    clip: float = float("inf")
    ma_dropped: bool = False

    def __post_init__(self):
        for name in ("ar", "ma", "last_values", "last_residuals"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(-1))
        object.__setattr__(self, "level_tails", tuple(float(v) for v in self.level_tails))
        if self.ar.size != self.order.p or self.ma.size != self.order.q:
            raise InvalidInput(f"coefficient counts do not match order {self.order}")
        if self.last_values.size != self.order.p or self.last_residuals.size != self.order.q:
            raise InvalidInput(f"forecast state does not match order {self.order}")
        if len(self.level_tails) != self.order.d:
            raise InvalidInput(f"need {self.order.d} level tails, got {len(self.level_tails)}")
        if not (np.all(np.isfinite(self.ar)) and np.all(np.isfinite(self.ma)) and np.isfinite(self.intercept)):
            raise InvalidInput("ARIMA coefficients must be finite")


def difference(series: Sequence[float], d: int) -> np.ndarray:
    """
    d-fold first differences.

    Raises:
        InsufficientData: if len(series) <= d
    """
    values = np.asarray(series, dtype=float)
    if d < 0:
        raise InvalidInput(f"differencing order must be >= 0, got {d}")
    if len(values) <= d:
        raise InsufficientData(f"series of length {len(values)} cannot be differenced {d} times")
    return np.diff(values, n=d) if d else values.copy()


def integrate(differenced: Sequence[float], initial_values: Sequence[float], include_initial: bool = True) -> np.ndarray:
    """
    Undo difference().

    Args:
        differenced: Series differenced len(initial_values) times
        initial_values: Value each level starts from, undifferenced level first
        include_initial: Prepend the starting value at each level (reconstruction)
            or only continue from it (forecasting)

    Returns:
        Level-0 series
    """
    values = np.asarray(differenced, dtype=float)
    for start in reversed(list(initial_values)):
        level = start + np.cumsum(values)
        values = np.concatenate(([start], level)) if include_initial else level
    return values


def _lag_matrix(series: np.ndarray, rows: range, lags: int) -> np.ndarray:
    return np.array([[series[t - k] for k in range(1, lags + 1)] for t in rows]).reshape(len(rows), lags)


def _least_squares(design: np.ndarray, target: np.ndarray):
    """OLS coefficients, or None when the design is rank deficient or underdetermined."""
    if design.shape[0] <= design.shape[1]:
        return None
    if np.linalg.matrix_rank(design) < design.shape[1]:
        return None
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coef


def _long_ar_residuals(w: np.ndarray) -> Tuple[np.ndarray, int]:
    n = len(w)
    m = max(1, min(MAX_LONG_AR_ORDER, n // 4))
    rows = range(m, n)
    design = np.column_stack([np.ones(len(rows)), _lag_matrix(w, rows, m)])
    coef = _least_squares(design, w[m:])
    residuals = np.zeros(n)
    if coef is not None:
        residuals[m:] = w[m:] - design @ coef
    return residuals, m


def fit(series: Sequence[float], order: ArimaOrder) -> ArimaModel:
    """
    Fit an ARIMA model.

    A series whose differences are constant gives an intercept-only model.
    If the second-stage regression is singular the MA terms are dropped
    (ma_dropped=True); if that is singular too the model is intercept-only.

    Args:
        series: Observations, at least order.min_observations long
            (RECOMMENDED_OBSERVATIONS or more for stable estimates)
        order: Model order

    Returns:
        Fitted ArimaModel

    Raises:
        InsufficientData: if the series is too short
        InvalidInput: if the series has non-finite values
    """
    values = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InvalidInput("series contains non-finite values")
    if len(values) < order.min_observations:
        raise InsufficientData(
            f"ARIMA{order} needs at least {order.min_observations} observations, got {len(values)}")

    p, d, q = order.p, order.d, order.q
    level_tails = tuple(float(difference(values, k)[-1]) for k in range(d))
    w = difference(values, d)
    n = len(w)
    clip = CLIP_FACTOR * float(np.max(np.abs(w)))

    def intercept_only(intercept: float, ma_dropped: bool = False) -> ArimaModel:
        return ArimaModel(
            order=order, ar=np.zeros(p), ma=np.zeros(q), intercept=intercept,
            last_values=w[n - p:] if p else _empty(), last_residuals=np.zeros(q),
            level_tails=level_tails, clip=clip, ma_dropped=ma_dropped,
        )

    if p == 0 and q == 0:
        return intercept_only(0.0)
    if np.ptp(w) == 0.0:
        return intercept_only(float(w[0]))

    if q > 0:
        innovations, m = _long_ar_residuals(w)
        start = max(p, q + m)
        rows = range(start, n)
        design = np.column_stack([
            np.ones(len(rows)), _lag_matrix(w, rows, p), _lag_matrix(innovations, rows, q)])
        coef = _least_squares(design, w[start:])
        if coef is not None:
            fitted_residuals = w[start:] - design @ coef
            return ArimaModel(
                order=order, ar=coef[1:1 + p], ma=coef[1 + p:], intercept=float(coef[0]),
                last_values=w[n - p:] if p else _empty(), last_residuals=fitted_residuals[-q:],
                level_tails=level_tails, clip=clip,
            )
        if p == 0:
            return intercept_only(float(np.mean(w)), ma_dropped=True)

    rows = range(p, n)
    design = np.column_stack([np.ones(len(rows)), _lag_matrix(w, rows, p)])
    coef = _least_squares(design, w[p:])
    if coef is None:
        return intercept_only(float(np.mean(w)), ma_dropped=q > 0)
    return ArimaModel(
        order=order, ar=coef[1:], ma=np.zeros(q), intercept=float(coef[0]),
        last_values=w[n - p:], last_residuals=np.zeros(q),
        level_tails=level_tails, clip=clip, ma_dropped=q > 0,
    )


def forecast(model: ArimaModel, h: int) -> np.ndarray:
    """
    h-step-ahead mean forecast on the level scale.

    Future innovations are zero. Differenced forecasts are clipped to
    +/- model.clip before integration and the result is always finite.
    """
    if h < 1:
        raise InvalidInput(f"forecast horizon must be >= 1, got {h}")
    p, q = model.order.p, model.order.q
    history = list(model.last_values)
    residuals = list(model.last_residuals)
    steps = []
    for _ in range(h):
        value = model.intercept
        for i in range(p):
            value += model.ar[i] * history[-1 - i]
        for j in range(q):
            value += model.ma[j] * residuals[-1 - j]
        value = float(np.clip(value, -model.clip, model.clip))
        history.append(value)
        residuals.append(0.0)
        steps.append(value)
    levels = integrate(np.asarray(steps), model.level_tails, include_initial=False)
    return np.nan_to_num(levels)
