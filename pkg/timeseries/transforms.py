"""
Stationarity transforms applied to a viewport coordinate series before
ARIMA fitting, and their inverse for the forecasts.

Horizontal series: width adjustment (seam unwrapping), +width shift,
uniform(0, 0.1) jitter, natural log. Vertical series: jitter and log.
Jitter only breaks ties between identical values and is not inverted.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import InvalidState

JITTER_HIGH = 0.1


@dataclass(frozen=True)
class TransformChain:
    """Parameters needed to map forecasts back to pixel coordinates."""

    shift: float
    jitter_seed: Optional[Any]
    log_applied: bool = True
    width_adjusted: bool = False


def adjust_width(series: Sequence[float], width: float) -> np.ndarray:
    """
    Unwrap seam crossings so the series is continuous.

    Each value is replaced, left to right, by its representative
    x + k * width closest to the previous adjusted value. For a single
    crossing this is the usual rule: use x + width when it is closer to the
    previous value, x - width when that is closer, otherwise x.
    """
    values = np.asarray(series, dtype=float).copy()
    for f in range(1, len(values)):
        k = np.rint((values[f - 1] - values[f]) / width)
        values[f] += k * width
    return values


def apply_transforms(
    series: Sequence[float], width: float, jitter_seed: Optional[Any] = None, horizontal: bool = True
) -> Tuple[np.ndarray, TransformChain]:
    """
    Transform a raw viewport coordinate series into the log domain.

    Args:
        series: Raw coordinates in pixels
        width: Frame width in pixels
        jitter_seed: Seed (or seed sequence entropy) for the jitter RNG
        horizontal: Apply width adjustment and shift (x coordinates)

    Returns:
        (transformed series, chain)

    Raises:
        InvalidState: if a value is non-positive before the log
    """
    values = np.asarray(series, dtype=float)
    shift = 0.0
    if horizontal:
        values = adjust_width(values, width)
        shift = float(width)
        values = values + shift
    rng = np.random.default_rng(jitter_seed)
    values = values + rng.uniform(0.0, JITTER_HIGH, size=len(values))
    if np.any(values <= 0):
        raise InvalidState("non-positive value in viewport series, cannot take log")
    chain = TransformChain(shift=shift, jitter_seed=jitter_seed, log_applied=True, width_adjusted=horizontal)
    return np.log(values), chain


def invert_forecast(values: Sequence[float], chain: TransformChain, width: float) -> np.ndarray:
    """
    Map log-domain forecasts back to (unwrapped) pixel coordinates.

    Exponentiated values are clamped to [1, 2 * width + shift] before the
    shift is removed. The mod-width wrap is left to the caller.
    """
    values = np.nan_to_num(np.asarray(values, dtype=float))
    upper = 2.0 * width + chain.shift
    if chain.log_applied:
        values = np.exp(np.clip(values, 0.0, np.log(upper)))
    else:
        values = np.clip(values, 1.0, upper)
    return values - chain.shift
