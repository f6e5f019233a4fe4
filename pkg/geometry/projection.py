"""
Coordinate conversions between equirectangular pixels, spherical angles
and cubemap faces.

All angles are radians. theta is the azimuth in [-pi, pi], phi the
elevation in [-pi/2, pi/2]. Pixel x grows with theta and pixel y grows
with phi, so (0, 0) is (theta=-pi, phi=-pi/2).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from core.exceptions import DegenerateInput, InvalidInput, OutOfFrame

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SphericalPoint:
    """Point on a sphere of radius rho."""

    rho: float
    theta: float
    phi: float

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidInput(f"rho must be positive, got {self.rho}")
        if abs(self.theta) > math.pi + _ANGLE_TOL:
            raise InvalidInput(f"theta out of range: {self.theta}")
        if abs(self.phi) > math.pi / 2 + _ANGLE_TOL:
            raise InvalidInput(f"phi out of range: {self.phi}")


@dataclass(frozen=True)
class EquirectPoint:
    """Pixel position in an equirectangular frame."""

    x: float
    y: float


class CubeFace(str, Enum):
    FRONT = "front"
    RIGHT = "right"
    BACK = "back"
    LEFT = "left"
    TOP = "top"
    BOTTOM = "bottom"


# Tie precedence when two axes are equally dominant
FACE_PRECEDENCE = (
    CubeFace.FRONT, CubeFace.RIGHT, CubeFace.BACK,
    CubeFace.LEFT, CubeFace.TOP, CubeFace.BOTTOM,
)


@dataclass(frozen=True)
class CubemapPoint:
    """Face-local position on a cube of edge length size."""

    face: CubeFace
    u: float
    v: float


def validate_frame(width: float, height: float) -> None:
    """
    Check equirectangular frame dimensions.

    Args:
        width: Frame width in pixels
        height: Frame height in pixels

    Raises:
        InvalidInput: if a dimension is not positive or width != 2 * height
    """
    if width <= 0 or height <= 0:
        raise InvalidInput(f"frame dimensions must be positive, got {width}x{height}")
    if width != 2 * height:
        raise InvalidInput(f"equirectangular frame must be 2:1, got {width}x{height}")


def _below(limit: float) -> float:
    return float(np.nextafter(float(limit), 0.0))


def cartesian_to_spherical(cx: float, cy: float, cz: float) -> SphericalPoint:
    """
    Convert a Cartesian vector to spherical coordinates.

    Args:
        cx, cy, cz: Cartesian components

    Returns:
        SphericalPoint with rho equal to the vector norm

    Raises:
        DegenerateInput: for the zero vector
    """
    rho = math.sqrt(cx * cx + cy * cy + cz * cz)
    if rho == 0.0:
        raise DegenerateInput("cannot convert the zero vector to spherical coordinates")
    # any azimuth is valid at a pole, 0 is canonical
    theta = 0.0 if cx == 0.0 and cy == 0.0 else math.atan2(cy, cx)
    phi = math.asin(max(-1.0, min(1.0, cz / rho)))
    return SphericalPoint(rho=rho, theta=theta, phi=phi)


def spherical_to_cartesian(s: SphericalPoint) -> Tuple[float, float, float]:
    """Inverse of cartesian_to_spherical."""
    cos_phi = math.cos(s.phi)
    return (
        s.rho * cos_phi * math.cos(s.theta),
        s.rho * cos_phi * math.sin(s.theta),
        s.rho * math.sin(s.phi),
    )


def equirect_to_spherical(p: EquirectPoint, width: float, height: float) -> SphericalPoint:
    """
    Map an equirectangular pixel to longitude/latitude on the sphere.

    Args:
        p: Pixel position
        width: Frame width in pixels
        height: Frame height in pixels

    Returns:
        SphericalPoint with rho = width / (2 * pi)

    Raises:
        OutOfFrame: if p lies outside [0, width) x [0, height)
    """
    validate_frame(width, height)
    if not (0 <= p.x < width and 0 <= p.y < height):
        raise OutOfFrame(f"point ({p.x}, {p.y}) outside {width}x{height} frame")
    theta = (p.x / width) * 2.0 * math.pi - math.pi
    phi = (p.y / height) * math.pi - math.pi / 2.0
    return SphericalPoint(rho=width / (2.0 * math.pi), theta=theta, phi=phi)


def spherical_to_equirect(s: SphericalPoint, width: float, height: float) -> EquirectPoint:
    """
    Map longitude/latitude to an equirectangular pixel.

    theta = pi lands on the seam and wraps to x = 0. phi = pi/2 is clamped
    just below the bottom row so the result stays inside the frame.
    """
    validate_frame(width, height)
    x = (s.theta + math.pi) / (2.0 * math.pi) * width
    x = x % width
    if x >= width:
        x -= width
    y = (s.phi + math.pi / 2.0) / math.pi * height
    y = min(max(y, 0.0), _below(height))
    return EquirectPoint(x=x, y=y)


def equirect_to_unit_vectors(xs, ys, width: float, height: float) -> np.ndarray:
    """
    Vectorised pixel -> unit vector conversion.

    Args:
        xs: Array of x pixel coordinates
        ys: Array of y pixel coordinates
        width: Frame width in pixels
        height: Frame height in pixels

    Returns:
        Array of shape (n, 3)
    """
    theta = np.asarray(xs, dtype=float) / width * 2.0 * np.pi - np.pi
    phi = np.asarray(ys, dtype=float) / height * np.pi - np.pi / 2.0
    cos_phi = np.cos(phi)
    return np.stack([cos_phi * np.cos(theta), cos_phi * np.sin(theta), np.sin(phi)], axis=-1)


def _select_face(x: float, y: float, z: float) -> CubeFace:
    candidates = {
        CubeFace.FRONT: x,
        CubeFace.RIGHT: y,
        CubeFace.BACK: -x,
        CubeFace.LEFT: -y,
        CubeFace.TOP: z,
        CubeFace.BOTTOM: -z,
    }
    dominant = max(candidates.values())
    for face in FACE_PRECEDENCE:
        if candidates[face] == dominant:
            return face
    raise DegenerateInput("no dominant cube face")


def spherical_to_cubemap(s: SphericalPoint, size: float) -> CubemapPoint:
    """
    Project a spherical point onto the cube face its direction hits.

    The face is the dominant axis of the direction vector, which is the
    exact form of the |tan(phi) sec(theta)| < 1 test for the lateral faces.
    On the front face the in-face coordinates are (tan(theta),
    tan(phi) sec(theta)); the other faces are rotations of it.

    Args:
        s: Spherical point (rho is ignored)
        size: Face edge length in pixels

    Returns:
        CubemapPoint with u, v in [0, size)
    """
    if size <= 0:
        raise InvalidInput(f"cube face size must be positive, got {size}")
    cos_phi = math.cos(s.phi)
    x = cos_phi * math.cos(s.theta)
    y = cos_phi * math.sin(s.theta)
    z = math.sin(s.phi)
    face = _select_face(x, y, z)

    if face is CubeFace.FRONT:
        a, b = y / x, z / x
    elif face is CubeFace.BACK:
        d = -x
        a, b = -y / d, z / d
    elif face is CubeFace.RIGHT:
        a, b = -x / y, z / y
    elif face is CubeFace.LEFT:
        d = -y
        a, b = x / d, z / d
    elif face is CubeFace.TOP:
        a, b = y / z, -x / z
    else:
        d = -z
        a, b = y / d, x / d

    upper = _below(size)
    u = min(max((a + 1.0) / 2.0 * size, 0.0), upper)
    v = min(max((1.0 - b) / 2.0 * size, 0.0), upper)
    return CubemapPoint(face=face, u=u, v=v)


def cubemap_to_spherical(c: CubemapPoint, size: float) -> SphericalPoint:
    """
    Inverse of spherical_to_cubemap on face interiors.

    Args:
        c: Cubemap point
        size: Face edge length in pixels

    Returns:
        SphericalPoint with rho = 2 * size
    """
    if size <= 0:
        raise InvalidInput(f"cube face size must be positive, got {size}")
    a = 2.0 * c.u / size - 1.0
    b = 1.0 - 2.0 * c.v / size
    face = CubeFace(c.face)
    vectors = {
        CubeFace.FRONT: (1.0, a, b),
        CubeFace.BACK: (-1.0, -a, b),
        CubeFace.RIGHT: (-a, 1.0, b),
        CubeFace.LEFT: (a, -1.0, b),
        CubeFace.TOP: (-b, a, 1.0),
        CubeFace.BOTTOM: (b, a, -1.0),
    }
    direction = cartesian_to_spherical(*vectors[face])
    return SphericalPoint(rho=2.0 * size, theta=direction.theta, phi=direction.phi)
