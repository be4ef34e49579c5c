"""Small quaternion and vector helpers.

Quaternions are stored scalar-first, ``(w, x, y, z)``.
"""

from __future__ import annotations

import math

import numpy as np


def cross(a, b):
    # np.cross carries a lot of per-call overhead for 3-vectors
    return np.array(
        (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    )


def dot(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def norm(a) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = norm(axis)
    if n == 0.0:
        return quat_identity()
    s = math.sin(0.5 * angle) / n
    return np.array([math.cos(0.5 * angle), axis[0] * s, axis[1] * s, axis[2] * s])


def quat_from_rotvec(rv) -> np.ndarray:
    """Unit quaternion for the rotation vector ``rv`` (axis times angle)."""
    angle = norm(rv)
    if angle < 1e-12:
        # second-order series keeps the map smooth near zero
        q = np.array([1.0 - angle * angle / 8.0, 0.5 * rv[0], 0.5 * rv[1], 0.5 * rv[2]])
        return q / math.sqrt(dot4(q, q))
    s = math.sin(0.5 * angle) / angle
    return np.array([math.cos(0.5 * angle), rv[0] * s, rv[1] * s, rv[2] * s])


def dot4(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]


def quat_mul(p, q) -> np.ndarray:
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return np.array(
        (
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        )
    )


def quat_normalize(q) -> np.ndarray:
    return q / math.sqrt(dot4(q, q))


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    return np.array(
        (
            (1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)),
            (2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)),
            (2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)),
        )
    )


def rotate_about(v, axis, angle: float) -> np.ndarray:
    """Rodrigues rotation of ``v`` about the unit ``axis``."""
    c, s = math.cos(angle), math.sin(angle)
    return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1.0 - c))
