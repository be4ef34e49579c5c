"""Shapes, narrow-phase contact queries and surface curvature.

Every query returns a :class:`ContactGeom` whose normal points into the
first body of the call ("body i") together with one point on each body
surface.  Bodies are posed by a world position and a 3x3 rotation matrix
(body-to-world).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .rotation import cross, dot, norm

_IDENTITY = np.eye(3)
_ORIGIN = np.zeros(3)
SURFACE_TOL = 1e-6


class GeometryError(ValueError):
    """Degenerate geometric input (coincident centres, point off surface, ...)."""


@dataclass(frozen=True)
class Plane:
    """Half-space bounded by a plane; ``normal`` is the outward unit normal."""

    point: np.ndarray = field(default_factory=lambda: np.zeros(3))
    normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(norm(n) - 1.0) > 1e-12:
            raise GeometryError(f"plane normal must be unit length, got |n|={norm(n)}")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("sphere radius must be positive")


@dataclass(frozen=True)
class Disk2D:
    """Disk of given radius lying in the body-local x-z plane (axis = local y)."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("disk radius must be positive")


@dataclass(frozen=True)
class Ellipsoid:
    semi_axes: tuple

    def __post_init__(self):
        axes = tuple(float(s) for s in self.semi_axes)
        if len(axes) != 3 or min(axes) <= 0:
            raise GeometryError("ellipsoid needs three positive semi-axes")
        object.__setattr__(self, "semi_axes", axes)


@dataclass(frozen=True)
class Box:
    """Rectangular block, used for the brick; only face-down plane contact is meaningful."""

    half_extents: tuple

    def __post_init__(self):
        h = tuple(float(s) for s in self.half_extents)
        if len(h) != 3 or min(h) <= 0:
            raise GeometryError("box needs three positive half extents")
        object.__setattr__(self, "half_extents", h)


Shape = Union[Plane, Sphere, Disk2D, Ellipsoid, Box]


@dataclass
class ContactGeom:
    point_i: np.ndarray
    point_j: np.ndarray
    normal: np.ndarray  # unit, pointing into body i
    depth: float


def _flip(geom: Optional[ContactGeom]) -> Optional[ContactGeom]:
    if geom is None:
        return None
    return ContactGeom(geom.point_j, geom.point_i, -geom.normal, geom.depth)


def _world_plane(plane: Plane, position, rotation) -> tuple:
    if position is None:
        return plane.point, plane.normal
    return position + rotation @ plane.point, rotation @ plane.normal


def sphere_plane_contact(center, radius: float, plane: Plane, tolerance: float = 0.0):
    """Sphere (body i) against a half-space (body j).

    The normal is the plane's outward normal, i.e. it points into the sphere.
    Returns ``None`` when the gap exceeds ``tolerance``.
    """
    center = np.asarray(center, dtype=float)
    n = plane.normal
    height = dot(center - plane.point, n)
    depth = radius - height
    if depth < -tolerance:
        return None
    return ContactGeom(center - radius * n, center - height * n, n.copy(), depth)


def sphere_sphere_contact(center_i, radius_i: float, center_j, radius_j: float,
                          tolerance: float = 0.0):
    center_i = np.asarray(center_i, dtype=float)
    center_j = np.asarray(center_j, dtype=float)
    d = center_i - center_j
    dist = norm(d)
    if dist < 1e-14:
        raise GeometryError("coincident sphere centres leave the contact normal undefined")
    depth = radius_i + radius_j - dist
    if depth < -tolerance:
        return None
    n = d / dist
    return ContactGeom(center_i - radius_i * n, center_j + radius_j * n, n, depth)


def ellipsoid_support(semi_axes, rotation, direction) -> np.ndarray:
    """Body-frame offset of the ellipsoid surface point extremal along ``direction``."""
    a = np.asarray(semi_axes, dtype=float)
    d_local = rotation.T @ direction
    scaled = a * d_local
    return rotation @ (a * scaled / norm(scaled))


def ellipsoid_plane_contact(center, rotation, semi_axes, plane: Plane, tolerance: float = 0.0):
    """Ellipsoid (body i) against a half-space (body j) via the support mapping."""
    center = np.asarray(center, dtype=float)
    n = plane.normal
    c_i = center + ellipsoid_support(semi_axes, rotation, -n)
    depth = -dot(c_i - plane.point, n)
    if depth < -tolerance:
        return None
    return ContactGeom(c_i, c_i + depth * n, n.copy(), depth)


def disk_plane_contact(center, rotation, radius: float, plane: Plane, tolerance: float = 0.0):
    """Disk (body i) against a half-space; the disk rim point furthest along -n touches."""
    center = np.asarray(center, dtype=float)
    n = plane.normal
    axis = rotation[:, 1]
    d = -n - dot(-n, axis) * axis
    dn = norm(d)
    if dn < 1e-12:
        raise GeometryError("disk lies flat on the plane; rim contact undefined")
    c_i = center + radius * d / dn
    depth = -dot(c_i - plane.point, n)
    if depth < -tolerance:
        return None
    return ContactGeom(c_i, c_i + depth * n, n.copy(), depth)


def box_plane_contact(center, rotation, half_extents, plane: Plane, tolerance: float = 0.0):
    """Box (body i) against a half-space.

    Axis components of -n that vanish (to 1e-9) contribute no offset, so a
    box resting on a face reports the face centre.
    """
    center = np.asarray(center, dtype=float)
    n = plane.normal
    d_local = -(rotation.T @ n)
    offset = np.where(np.abs(d_local) < 1e-9, 0.0, np.sign(d_local)) * half_extents
    c_i = center + rotation @ offset
    depth = -dot(c_i - plane.point, n)
    if depth < -tolerance:
        return None
    return ContactGeom(c_i, c_i + depth * n, n.copy(), depth)


def collide(shape_i: Shape, position_i, rotation_i, shape_j: Shape, position_j, rotation_j,
            tolerance: float = 0.0) -> Optional[ContactGeom]:
    """Dispatch to the narrow-phase query; the normal points into body i."""
    if isinstance(shape_i, Plane) and isinstance(shape_j, Plane):
        raise GeometryError("plane-plane contact is not supported")
    if isinstance(shape_i, Plane):
        return _flip(collide(shape_j, position_j, rotation_j, shape_i, position_i, rotation_i,
                             tolerance))
    if isinstance(shape_j, Plane):
        point, normal = _world_plane(shape_j, position_j, rotation_j)
        plane = shape_j if position_j is None else Plane(point, normal)
        if isinstance(shape_i, Sphere):
            return sphere_plane_contact(position_i, shape_i.radius, plane, tolerance)
        if isinstance(shape_i, Ellipsoid):
            return ellipsoid_plane_contact(position_i, rotation_i, shape_i.semi_axes, plane,
                                           tolerance)
        if isinstance(shape_i, Disk2D):
            return disk_plane_contact(position_i, rotation_i, shape_i.radius, plane, tolerance)
        if isinstance(shape_i, Box):
            return box_plane_contact(position_i, rotation_i, shape_i.half_extents, plane,
                                     tolerance)
    if isinstance(shape_i, Sphere) and isinstance(shape_j, Sphere):
        return sphere_sphere_contact(position_i, shape_i.radius, position_j, shape_j.radius,
                                     tolerance)
    raise GeometryError(
        f"no contact query for {type(shape_i).__name__}-{type(shape_j).__name__}")


# -- curvature ---------------------------------------------------------------

def _local(point, position, rotation):
    if position is None:
        return np.asarray(point, dtype=float), _IDENTITY
    return rotation.T @ (np.asarray(point, dtype=float) - position), rotation


def surface_distance(shape: Shape, point, position=None, rotation=None) -> float:
    """Approximate distance of ``point`` from the shape surface (first order for ellipsoids)."""
    p, rot = _local(point, position, rotation)
    if isinstance(shape, Plane):
        return abs(dot(p - shape.point, shape.normal))
    if isinstance(shape, Sphere):
        return abs(norm(p) - shape.radius)
    if isinstance(shape, Disk2D):
        return math.hypot(abs(math.hypot(p[0], p[2]) - shape.radius), p[1])
    if isinstance(shape, Ellipsoid):
        a2 = np.square(shape.semi_axes)
        f = float(np.sum(p * p / a2)) - 1.0
        g = 2.0 * norm(p / a2)
        return abs(f) / g
    if isinstance(shape, Box):
        return abs(float(np.max(np.abs(p) - np.asarray(shape.half_extents))))
    raise GeometryError(f"unknown shape {shape!r}")


def _check_on_surface(shape, point, position, rotation):
    dist = surface_distance(shape, point, position, rotation)
    if dist > SURFACE_TOL:
        raise GeometryError(f"point is {dist:.3e} m off the surface")


def _ellipsoid_shape_operator(semi_axes, p_local):
    """Unit outward normal and the (3x3) second fundamental form of the level set."""
    a2 = np.square(semi_axes)
    grad = p_local / a2
    g = norm(grad)
    n = grad / g
    hess = np.diag(1.0 / a2) / g
    proj = np.eye(3) - np.outer(n, n)
    return n, proj @ hess @ proj


def normal_curvature(shape: Shape, point, direction, position=None, rotation=None) -> float:
    """Normal curvature (1/m, convex positive) of the surface along a unit tangent direction."""
    _check_on_surface(shape, point, position, rotation)
    if isinstance(shape, (Plane, Box)):
        return 0.0
    if isinstance(shape, Sphere):
        return 1.0 / shape.radius
    p, rot = _local(point, position, rotation)
    t = rot.T @ np.asarray(direction, dtype=float)
    if isinstance(shape, Disk2D):
        # cylinder-like rim: curved in the disk plane, straight along the axis
        return (1.0 - t[1] * t[1]) / shape.radius
    n, form = _ellipsoid_shape_operator(shape.semi_axes, p)
    t = t - dot(t, n) * n
    tn = norm(t)
    if tn < 1e-12:
        raise GeometryError("direction is not tangent to the surface")
    t = t / tn
    return float(t @ form @ t)


def principal_curvatures(shape: Shape, point, position=None, rotation=None) -> tuple:
    _check_on_surface(shape, point, position, rotation)
    if isinstance(shape, (Plane, Box)):
        return 0.0, 0.0
    if isinstance(shape, Sphere):
        return 1.0 / shape.radius, 1.0 / shape.radius
    if isinstance(shape, Disk2D):
        return 1.0 / shape.radius, 0.0
    p, _ = _local(point, position, rotation)
    n, form = _ellipsoid_shape_operator(shape.semi_axes, p)
    vals = np.linalg.eigvalsh(form)
    # one eigenvalue belongs to the normal direction and is zero
    k = sorted(vals, key=abs)[1:]
    return float(max(k)), float(min(k))


def spin_curvature(shape: Shape, point, position=None, rotation=None) -> float:
    """Mean of the two principal curvatures at a surface point."""
    k1, k2 = principal_curvatures(shape, point, position, rotation)
    return 0.5 * (k1 + k2)


def chord_arc_length(c_prev, c_cur) -> float:
    """Straight-line stand-in for the geodesic length between two surface points."""
    d = np.asarray(c_cur, dtype=float) - np.asarray(c_prev, dtype=float)
    return norm(d)
