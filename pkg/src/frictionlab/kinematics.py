"""Contact-frame continuation and contact-point displacement vectors.

Each body in a contact carries a tangent frame (n, u, w).  Between steps
the frame rides along with its body; at the new step it is re-fitted to
the new normal by the closed-form maximiser of ``u_old.u + w_old.w``.
Comparing the two bodies' re-fitted frames yields the spin angle, and the
movement of the contact point over each surface yields the tangent
vectors p_i and p_j whose difference is the slip increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rotation import cross, dot, norm

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])
_UNIT_TOL = 1e-9
_HALF_TURN_X = np.diag([1.0, -1.0, -1.0])
_HALF_TURN_X.setflags(write=False)


@dataclass
class ContactFrame:
    n: np.ndarray
    u: np.ndarray
    w: np.ndarray

    def to_world(self, vec2) -> np.ndarray:
        return vec2[0] * self.u + vec2[1] * self.w

    def to_local(self, vec3) -> np.ndarray:
        return np.array((dot(vec3, self.u), dot(vec3, self.w)))


@dataclass
class ContactTrack:
    """Where the contact point sat on one body at the previous step."""

    frame: ContactFrame
    c_prev: np.ndarray
    arc_len: float = 0.0
    p: np.ndarray = field(default_factory=lambda: np.zeros(2))


def _check_unit(n, name="normal"):
    length = norm(n)
    if length == 0.0:
        raise ValueError(f"{name} has zero length")
    if abs(length - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be unit length, got {length!r}")


def init_frame(n0) -> ContactFrame:
    """Deterministic frame for a fresh contact.

    u is e_x projected onto the tangent plane (e_y when e_x is nearly
    normal) and w = n x u, so that u x w = n.
    """
    n0 = np.asarray(n0, dtype=float)
    if norm(n0) == 0.0:
        raise ValueError("zero-length normal")
    n0 = n0 / norm(n0)
    seed = _EX if abs(n0[0]) <= 0.99 else _EY
    u = seed - dot(seed, n0) * n0
    u = u / norm(u)
    return ContactFrame(n0, u, cross(n0, u))


def align_rotation(n) -> np.ndarray:
    """Proper rotation R with R @ n = e_z.

    On the lower hemisphere -n is aligned instead and a half turn about
    e_x finishes the job, which keeps 1/(1+c) well conditioned.
    """
    n = np.asarray(n, dtype=float)
    if n[2] < 0.0:
        return _HALF_TURN_X @ _align_upper(-n)
    return _align_upper(n)


def _align_upper(n) -> np.ndarray:
    c = n[2]
    # axis k = n x e_z (unnormalised, |k| = sin), Rodrigues with 1/(1+c), c >= 0
    kx, ky = n[1], -n[0]
    f = 1.0 / (1.0 + c)
    return np.array(
        (
            (c + kx * kx * f, kx * ky * f, ky),
            (kx * ky * f, c + ky * ky * f, -kx),
            (-ky, kx, c),
        )
    )


def best_angle(a, b) -> float:
    """Angle maximising f = (a_x+b_y) sin + (a_y-b_x) cos; ties go to the smaller angle."""
    s = a[0] + b[1]
    c = a[1] - b[0]
    if c == 0.0:
        candidates = (0.5 * math.pi, 1.5 * math.pi)
    else:
        base = math.atan(s / c) % (2.0 * math.pi)
        candidates = tuple(sorted((base, (base + math.pi) % (2.0 * math.pi))))
    t0, t1 = candidates
    f0 = s * math.sin(t0) + c * math.cos(t0)
    f1 = s * math.sin(t1) + c * math.cos(t1)
    return t1 if f1 > f0 + 1e-14 else t0


def continue_frame(u_carried, w_carried, n_new):
    """Tangent axes at ``n_new`` best aligned with the carried (u, w)."""
    n_new = np.asarray(n_new, dtype=float)
    _check_unit(n_new)
    if abs(dot(u_carried, n_new)) < 1e-15 and abs(dot(w_carried, n_new)) < 1e-15:
        # already tangent: the maximiser returns the carried axes themselves
        return u_carried, w_carried
    rot = align_rotation(n_new)
    a = rot @ u_carried
    b = rot @ w_carried
    theta = best_angle(a, b)
    st, ct = math.sin(theta), math.cos(theta)
    # back to world: rot.T @ (st, ct, 0) and rot.T @ (-ct, st, 0)
    r0, r1 = rot[0], rot[1]
    u = st * r0 + ct * r1
    w = -ct * r0 + st * r1
    return u, w


def spin_angle(frame_i: ContactFrame, frame_j: ContactFrame) -> float:
    """Signed rotation about n carrying the j-frame onto the i-frame, in (-pi, pi]."""
    n, m = frame_i.n, frame_j.n
    if n is not m and abs(n[0] - m[0]) + abs(n[1] - m[1]) + abs(n[2] - m[2]) > 1e-9:
        raise ValueError("spin angle needs both frames to share the contact normal")
    a, b = frame_j.u, frame_i.u
    sin_part = ((a[1] * b[2] - a[2] * b[1]) * n[0] + (a[2] * b[0] - a[0] * b[2]) * n[1]
                + (a[0] * b[1] - a[1] * b[0]) * n[2])
    psi = math.atan2(sin_part, dot(a, b))
    if psi == -math.pi:
        psi = math.pi
    return psi


def tangent_displacement(c_prev, c_new, n) -> np.ndarray:
    """World tangent vector from the projected old contact point to the new one.

    The old point is dropped onto the tangent plane along n and the result
    is rescaled to the chord length |c_new - c_prev|.
    """
    dx, dy, dz = c_new[0] - c_prev[0], c_new[1] - c_prev[1], c_new[2] - c_prev[2]
    arc = math.sqrt(dx * dx + dy * dy + dz * dz)
    along = dx * n[0] + dy * n[1] + dz * n[2]
    vx, vy, vz = dx - along * n[0], dy - along * n[1], dz - along * n[2]
    vn = math.sqrt(vx * vx + vy * vy + vz * vz)
    if vn < 1e-300 or arc == 0.0:
        return np.zeros(3)
    scale = arc / vn
    return np.array((vx * scale, vy * scale, vz * scale))


def displacement_vector(track: ContactTrack, c_new, frame_new: ContactFrame) -> np.ndarray:
    """Tangent 2-vector p (frame coordinates) for one body; also refreshes ``track``."""
    c_new = np.asarray(c_new, dtype=float)
    p_world = tangent_displacement(track.c_prev, c_new, frame_new.n)
    p = frame_new.to_local(p_world)
    track.arc_len = norm(c_new - track.c_prev)
    track.p = p
    track.c_prev = c_new
    track.frame = frame_new
    return p


def counter_spin(p_bar) -> np.ndarray:
    """Re-express the j-side vector in the i-frame after undoing the spin.

    Rotating the j-frame by psi onto the i-frame keeps the angle between
    the vector and the first axis, so frame coordinates carry over as-is.
    """
    return np.array(p_bar, dtype=float)


def slip_increment(p_i, p_j) -> np.ndarray:
    return np.asarray(p_i, dtype=float) - np.asarray(p_j, dtype=float)
