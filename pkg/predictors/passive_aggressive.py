"""
Online passive-aggressive regression over (bias, intermediate viewport,
object coordinates).

The feature vector is x = (1, intermediate, o_1, ..., o_k) where o_i are
the coordinates of the objects visible in the frame. Objects never seen
have weight 0. The same model also fits residuals: with the intermediate
as origin its feature is 0 and the o_i are offsets from it.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping

from core.exceptions import InvalidInput


@dataclass(frozen=True)
class PaHyper:
    """C: aggressiveness, epsilon: hinge dead zone, alpha: step scale."""

    c: float = 0.01
    epsilon: float = 0.001
    alpha: float = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise InvalidInput(f"C must be positive, got {self.c}")
        if self.epsilon < 0:
            raise InvalidInput(f"epsilon must be >= 0, got {self.epsilon}")
        if self.alpha <= 0:
            raise InvalidInput(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class PaModel:
    bias: float = 0.0
    w_intermediate: float = 0.0
    w_objects: Dict[int, float] = field(default_factory=dict)
    hyper: PaHyper = field(default_factory=PaHyper)


def object_term(m: PaModel, objects: Mapping[int, float]) -> float:
    return sum(m.w_objects.get(object_id, 0.0) * value for object_id, value in objects.items())


def pa_predict(m: PaModel, intermediate: float, objects: Mapping[int, float]) -> float:
    """bias + w_intermediate * intermediate + sum_i w_objects[i] * objects[i]."""
    return m.bias + m.w_intermediate * intermediate + object_term(m, objects)


def pa_update(m: PaModel, intermediate: float, objects: Mapping[int, float], target: float) -> PaModel:
    """
    One passive-aggressive step with the epsilon-insensitive hinge loss.

    loss = max(0, |target - prediction| - epsilon). When loss > 0 every
    weight moves by tau * sign(target - prediction) * feature with
    tau = alpha * loss / (||x||^2 + 1 / (2C)).

    Args:
        m: Current model
        intermediate: Intermediate viewport coordinate
        objects: Object ID -> coordinate for this frame
        target: Actual viewport coordinate

    Returns:
        Updated model (m itself when the loss is 0)
    """
    error = target - pa_predict(m, intermediate, objects)
    loss = max(0.0, abs(error) - m.hyper.epsilon)
    if loss == 0.0:
        return m
    squared_norm = 1.0 + intermediate * intermediate + sum(v * v for v in objects.values())
    tau = m.hyper.alpha * loss / (squared_norm + 1.0 / (2.0 * m.hyper.c))
    step = tau if error > 0 else -tau
    w_objects = dict(m.w_objects)
    for object_id, value in objects.items():
        w_objects[object_id] = w_objects.get(object_id, 0.0) + step * value
    return replace(m, bias=m.bias + step, w_intermediate=m.w_intermediate + step * intermediate, w_objects=w_objects)


def _share(objects_part: float, intermediate_part: float) -> float:
    total = objects_part + intermediate_part
    if total == 0.0:
        return 0.0
    return objects_part / total


def object_contribution(m: PaModel, intermediate: float, objects: Mapping[int, float]) -> float:
    """
    Share of the prediction coming from object trajectories.

    |object term| / (|object term| + |bias + w_intermediate * intermediate|),
    0 when both terms are 0.
    """
    return _share(abs(object_term(m, objects)), abs(m.bias + m.w_intermediate * intermediate))


def residual_contribution(m: PaModel, origin: float, offsets: Mapping[int, float]) -> float:
    """
    object_contribution of a model fitted on offsets from origin.

    Such a model predicts origin + bias + sum_i w_i * offset_i. Written in
    absolute coordinates the origin carries weight 1 - sum_i w_i and each
    object, at origin + offset_i, carries w_i.

    Args:
        m: Model trained on offsets
        origin: Coordinate the offsets are taken from
        offsets: Object ID -> object coordinate minus origin
    """
    weights = sum(m.w_objects.get(object_id, 0.0) for object_id in offsets)
    objects_part = abs(sum(m.w_objects.get(object_id, 0.0) * (origin + value) for object_id, value in offsets.items()))
    return _share(objects_part, abs(m.bias + (1.0 - weights) * origin))
