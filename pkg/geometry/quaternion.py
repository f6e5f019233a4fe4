"""
Head-orientation quaternions and their gaze point on the frame.
"""

import math
from dataclasses import dataclass, replace
from typing import Tuple

from core.exceptions import InvalidQuaternion
from geometry.projection import EquirectPoint, cartesian_to_spherical, spherical_to_equirect
from utils import console

UNIT_TOLERANCE = 1e-6
NORMALIZE_TOLERANCE = 1e-3


@dataclass(frozen=True)
class HeadQuaternion:
    """Scalar-first unit quaternion (w, x, y, z) sampled at timestamp seconds."""

    w: float
    x: float
    y: float
    z: float
    timestamp: float = 0.0

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def normalized(self) -> "HeadQuaternion":
        n = self.norm()
        return replace(self, w=self.w / n, x=self.x / n, y=self.y / n, z=self.z / n)

    def rotate(self, vector: Tuple[float, float, float]) -> Tuple[float, float, float]:
        """Rotate a vector by this (unit) quaternion: q v q*."""
        w, x, y, z = self.w, self.x, self.y, self.z
        vx, vy, vz = vector
        # t = 2 * (q_vec x v)
        tx = 2.0 * (y * vz - z * vy)
        ty = 2.0 * (z * vx - x * vz)
        tz = 2.0 * (x * vy - y * vx)
        return (
            vx + w * tx + (y * tz - z * ty),
            vy + w * ty + (z * tx - x * tz),
            vz + w * tz + (x * ty - y * tx),
        )


# Gaze direction of the identity orientation: theta = 0, phi = 0
REFERENCE_GAZE = (1.0, 0.0, 0.0)


def check_unit(q: HeadQuaternion) -> HeadQuaternion:
    """
    Validate the norm of q, normalising small deviations.

    Raises:
        InvalidQuaternion: if | |q| - 1 | exceeds NORMALIZE_TOLERANCE
    """
    n = q.norm()
    deviation = abs(n - 1.0)
    if deviation <= UNIT_TOLERANCE:
        return q
    if deviation <= NORMALIZE_TOLERANCE and n > 0:
        console.warn(f"quaternion at t={q.timestamp} has norm {n:.8f}, normalising")
        return q.normalized()
    raise InvalidQuaternion(f"quaternion at t={q.timestamp} has norm {n}, not a unit quaternion")


def quaternion_to_viewport(q: HeadQuaternion, width: float, height: float) -> EquirectPoint:
    """
    Convert a head orientation to the viewport center on the frame.

    The reference gaze (1, 0, 0) is rotated by q, then projected through
    spherical coordinates. q and -q give the same point.

    Args:
        q: Head orientation
        width: Frame width in pixels
        height: Frame height in pixels

    Returns:
        Viewport center in equirectangular pixels
    """
    q = check_unit(q)
    gaze = q.rotate(REFERENCE_GAZE)
    return spherical_to_equirect(cartesian_to_spherical(*gaze), width, height)
