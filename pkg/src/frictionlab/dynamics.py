"""Rigid bodies, the per-step contact pipeline and the half-implicit integrator.

A step first evaluates every contact at the current poses (geometry, frame
continuation, slip/roll/spin increments, normal force, friction updates),
accumulates the resulting loads, and then advances each free body with

    v1 = v0 + dt * a0,      x1 = x0 + dt * v1,
    w1 = w0 + dt * I^-1 (tau - w0 x I w0),      q1 = exp(w1 dt) q0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import geometry as geo
from . import normal as nm
from .friction import (
    FrictionParams,
    Mode,
    RollState,
    SlideState,
    SpinState,
    critical_damping,
    derive_spin_stiffness,
    legacy_roll_torque,
    rocking_torque,
    roll_update,
    slide_update,
    spin_update,
)
from .kinematics import (
    ContactFrame,
    continue_frame,
    counter_spin,
    init_frame,
    slip_increment,
    spin_angle,
    tangent_displacement,
)
from .rotation import (
    cross,
    dot,
    norm,
    quat_from_rotvec,
    quat_identity,
    quat_mul,
    quat_normalize,
    quat_to_matrix,
)

_ZERO3 = np.zeros(3)
_ZERO3.setflags(write=False)


def _zero3():
    return _ZERO3


class NumericalError(RuntimeError):
    """Raised when a body state or load becomes non-finite."""


class Constraint(str, enum.Enum):
    NONE = "none"
    PLANAR_XZ = "planar_xz"  # motion in the x-z plane, rotation about y only
    TRANSLATION = "translation"  # orientation frozen


@dataclass
class Body:
    """Rigid body state.  Fixed bodies act as ground and never move."""

    shape: geo.Shape
    mass: float = 0.0
    inertia: np.ndarray = field(default_factory=lambda: np.zeros(3))
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=quat_identity)
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    fixed: bool = False
    constraint: Constraint = Constraint.NONE
    name: str = "body"

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, dtype=float)
        self.position = np.asarray(self.position, dtype=float)
        self.orientation = quat_normalize(np.asarray(self.orientation, dtype=float))
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        self.constraint = Constraint(self.constraint)
        if not self.fixed:
            if not self.mass > 0:
                raise ValueError(f"body {self.name!r}: mass must be positive")
            if self.inertia.shape != (3,) or np.any(self.inertia <= 0):
                raise ValueError(f"body {self.name!r}: need three positive principal moments")
        self.rotation = quat_to_matrix(self.orientation)

    def inertia_about(self, axis) -> float:
        """Moment of inertia about a world axis through the centre of mass."""
        a = self.rotation.T @ axis
        return float(self.inertia @ (a * a))


@dataclass
class ContactSpec:
    """A body pair that may touch, with its friction and normal-force models."""

    i: int
    j: int
    friction: FrictionParams
    normal: nm.NormalModel
    patch_model: Optional[nm.Hertzian] = None  # materials for the patch radius if normal is not Hertzian
    tolerance: float = 1e-9
    name: str = "contact"


@dataclass
class PairState:
    active: bool = False
    c_i: np.ndarray = field(default_factory=lambda: np.zeros(3))  # body-local contact points
    c_j: np.ndarray = field(default_factory=lambda: np.zeros(3))
    u_i: np.ndarray = field(default_factory=lambda: np.zeros(3))  # body-local tangent axes
    w_i: np.ndarray = field(default_factory=lambda: np.zeros(3))
    u_j: np.ndarray = field(default_factory=lambda: np.zeros(3))
    w_j: np.ndarray = field(default_factory=lambda: np.zeros(3))
    depth: float = 0.0
    slide: SlideState = field(default_factory=SlideState)
    roll_i: RollState = field(default_factory=RollState)
    roll_j: RollState = field(default_factory=RollState)
    spin: SpinState = field(default_factory=SpinState)


@dataclass
class ContactReport:
    """Loads and histories of one contact over one step; loads act on body j."""

    active: bool = False
    normal_force: float = 0.0
    depth: float = 0.0
    normal: np.ndarray = field(default_factory=_zero3)
    slide_elastic: np.ndarray = field(default_factory=_zero3)
    slide_damping: np.ndarray = field(default_factory=_zero3)
    slide_history: float = 0.0
    slide_mode: Mode = Mode.STATIC
    roll_elastic_i: np.ndarray = field(default_factory=_zero3)
    roll_damping_i: np.ndarray = field(default_factory=_zero3)
    roll_elastic_j: np.ndarray = field(default_factory=_zero3)
    roll_damping_j: np.ndarray = field(default_factory=_zero3)
    roll_history_i: float = 0.0
    roll_history_j: float = 0.0
    roll_mode_i: Mode = Mode.STATIC
    roll_mode_j: Mode = Mode.STATIC
    spin_elastic: float = 0.0
    spin_damping: float = 0.0
    spin_history: float = 0.0
    spin_mode: Mode = Mode.STATIC
    spin_angle: float = 0.0


class Loads:
    """Per-body force and torque (about the centre of mass) accumulator."""

    def __init__(self, n_bodies: int):
        self.force = np.zeros((n_bodies, 3))
        self.torque = np.zeros((n_bodies, 3))

    def clear(self):
        self.force[:] = 0.0
        self.torque[:] = 0.0

    def add_at(self, k: int, body: Body, force, point):
        self.force[k] += force
        self.torque[k] += cross(point - body.position, force)


def _mean_curvature(body: Body, point) -> float:
    shape = body.shape
    if isinstance(shape, (geo.Plane, geo.Box)):
        return 0.0
    if isinstance(shape, geo.Sphere):
        return 1.0 / shape.radius
    return geo.spin_curvature(shape, point, body.position, body.rotation)


def _curvature_along(body: Body, point, direction) -> float:
    shape = body.shape
    if isinstance(shape, (geo.Plane, geo.Box)):
        return 0.0
    if isinstance(shape, geo.Sphere):
        return 1.0 / shape.radius
    if direction is None:
        return _mean_curvature(body, point)
    if isinstance(shape, geo.Disk2D):
        t_axis = dot(body.rotation[:, 1], direction)
        return (1.0 - t_axis * t_axis) / shape.radius
    return geo.normal_curvature(shape, point, direction, body.position, body.rotation)


def _pair_value(bi: Body, bj: Body, value_i: Callable[[], float],
                value_j: Callable[[], float]) -> float:
    """Average over the pair; a fixed body defers to its partner."""
    if bi.fixed:
        return value_j()
    if bj.fixed:
        return value_i()
    return 0.5 * (value_i() + value_j())


def _direction(p2, frame: ContactFrame):
    mag = math.hypot(p2[0], p2[1])
    if mag < 1e-300:
        return None
    return (p2[0] * frame.u + p2[1] * frame.w) / mag


class World:
    """Bodies, contact pairs and gravity, advanced with a fixed step."""

    def __init__(self, bodies: Sequence[Body], contacts: Sequence[ContactSpec],
                 gravity=(0.0, 0.0, -9.8)):
        self.bodies: List[Body] = list(bodies)
        self.contacts: List[ContactSpec] = list(contacts)
        self.gravity = np.asarray(gravity, dtype=float)
        self.pairs = [PairState() for _ in self.contacts]
        # fixed planes never move, so their world placement is resolved once
        self._posed = {}
        for k, body in enumerate(self.bodies):
            if body.fixed and isinstance(body.shape, geo.Plane):
                self._posed[k] = geo.Plane(body.position + body.rotation @ body.shape.point,
                                           body.rotation @ body.shape.normal)
        self.loads = Loads(len(self.bodies))
        self.time = 0.0
        self.steps = 0
        for spec in self.contacts:
            if not (0 <= spec.i < len(self.bodies) and 0 <= spec.j < len(self.bodies)):
                raise ValueError(f"contact {spec.name!r} refers to a missing body")
            if spec.i == spec.j:
                raise ValueError(f"contact {spec.name!r} pairs a body with itself")

    # -- contact pipeline ------------------------------------------------------

    def contact_step(self, dt: float) -> List[ContactReport]:
        """Evaluate all contacts at the current poses and accumulate their loads."""
        self.loads.clear()
        reports = []
        for k, spec in enumerate(self.contacts):
            reports.append(self._contact(k, spec, dt))
        return reports

    def _contact(self, k: int, spec: ContactSpec, dt: float) -> ContactReport:
        state = self.pairs[k]
        bi, bj = self.bodies[spec.i], self.bodies[spec.j]
        geom = geo.collide(*self._pose(spec.i), *self._pose(spec.j), spec.tolerance)
        report = ContactReport()
        if geom is None:
            if state.active:
                self.pairs[k] = PairState()
            return report
        n = geom.normal
        pi, pj = geom.point_i, geom.point_j
        params = spec.friction

        depth_rate = (geom.depth - state.depth) / dt if state.active else 0.0
        state.depth = geom.depth
        r_eff = None
        if isinstance(spec.normal, nm.Hertzian) or spec.patch_model is not None:
            k_sum = _mean_curvature(bi, pi) + _mean_curvature(bj, pj)
            r_eff = 1.0 / k_sum if k_sum > 0 else math.inf
        if bi.fixed or bj.fixed:
            m_eff = bj.mass if bi.fixed else bi.mass
        else:
            m_eff = bi.mass * bj.mass / (bi.mass + bj.mass)
        big_n = nm.evaluate(spec.normal, max(geom.depth, 0.0), depth_rate, r_eff, m_eff)
        loads = self.loads
        fn = big_n * n
        report.active = True
        report.normal_force = big_n
        report.depth = geom.depth
        report.normal = n

        ri, rj = bi.rotation, bj.rotation
        if not state.active:
            frame = init_frame(n)
            self._store(state, bi, bj, pi, pj, frame)
            state.active = True
            self._apply_pair(spec, bi, bj, fn, pi, pj)
            return report

        # frames ride with their bodies, then are re-fitted to the new normal
        ui, wi = continue_frame(ri @ state.u_i, ri @ state.w_i, n)
        uj, wj = continue_frame(rj @ state.u_j, rj @ state.w_j, n)
        frame = ContactFrame(n, ui, wi)
        frame_j = ContactFrame(n, uj, wj)
        psi = spin_angle(frame, frame_j)
        p_i = frame.to_local(tangent_displacement(bi.position + ri @ state.c_i, pi, n))
        p_j = counter_spin(frame_j.to_local(
            tangent_displacement(bj.position + rj @ state.c_j, pj, n)))
        delta_s = slip_increment(p_i, p_j)
        self._store(state, bi, bj, pi, pj, frame)
        report.spin_angle = psi

        # slide
        if params.k_d is not None:
            k_d = params.k_d
        else:
            m_ij = _pair_value(bi, bj, lambda: bi.mass, lambda: bj.mass)
            k_d = params.damping_ratio * critical_damping(params.k_e, m_ij)
        load, state.slide = slide_update(state.slide, delta_s, big_n, params, dt, k_d)
        f_el = frame.to_world(load.elastic)
        f_d = frame.to_world(load.damping)
        # normal and slide forces share the contact points
        self._apply_pair(spec, bi, bj, fn + f_el + f_d, pi, pj)
        report.slide_elastic = -f_el
        report.slide_damping = -f_d
        report.slide_history = math.hypot(state.slide.s[0], state.slide.s[1])
        report.slide_mode = state.slide.mode

        # roll
        if params.roll_model == "legacy":
            self._legacy_roll(spec, bi, bj, pi, pj, n, big_n, report)
        elif params.eta_r > 0 or params.roll_stiffness is not None:
            for side in (0, 1):
                body, other = (bi, bj) if side == 0 else (bj, bi)
                point, other_point = (pi, pj) if side == 0 else (pj, pi)
                p_b = p_i if side == 0 else p_j
                roll = state.roll_i if side == 0 else state.roll_j
                if body.fixed and isinstance(body.shape, geo.Plane):
                    continue
                direction = _direction(p_b, frame)
                if direction is None:
                    direction = _direction(roll.theta, frame)
                kappa_b = _curvature_along(body, point, direction)
                kappa_o = _curvature_along(other, other_point, direction)
                axis = cross(n, direction) if direction is not None else frame.w
                inertia = _pair_value(bi, bj, lambda: bi.inertia_about(axis),
                                      lambda: bj.inertia_about(axis))
                load, new_roll = roll_update(roll, kappa_b, kappa_o, p_b, big_n, inertia,
                                             params, dt)
                outward = -n if side == 0 else n
                t_el = rocking_torque(load.elastic, frame, outward)
                t_d = rocking_torque(load.damping, frame, outward)
                k = spec.i if side == 0 else spec.j
                loads.torque[k] += t_el + t_d
                history = math.hypot(new_roll.theta[0], new_roll.theta[1])
                if side == 0:
                    state.roll_i = new_roll
                    report.roll_elastic_i, report.roll_damping_i = t_el, t_d
                    report.roll_history_i, report.roll_mode_i = history, new_roll.mode
                else:
                    state.roll_j = new_roll
                    report.roll_elastic_j, report.roll_damping_j = t_el, t_d
                    report.roll_history_j, report.roll_mode_j = history, new_roll.mode

        # spin
        stiffness, curvature = self._spin_stiffness(spec, bi, bj, pi, pj, geom.depth, big_n,
                                                    r_eff)
        if stiffness is not None:
            inertia = _pair_value(bi, bj, lambda: bi.inertia_about(n), lambda: bj.inertia_about(n))
            load, state.spin = spin_update(state.spin, psi, big_n, inertia, params, dt,
                                           curvature=curvature, stiffness=stiffness)
            torque = (load.elastic + load.damping) * n
            loads.torque[spec.i] += torque
            loads.torque[spec.j] -= torque
            report.spin_elastic = -load.elastic
            report.spin_damping = -load.damping
            report.spin_history = state.spin.psi
            report.spin_mode = state.spin.mode
        return report

    def _apply_pair(self, spec: ContactSpec, bi: Body, bj: Body, force, pi, pj):
        """Force on body i at ``pi`` and its reaction on body j at ``pj``; fixed bodies skipped."""
        if not bi.fixed:
            self.loads.add_at(spec.i, bi, force, pi)
        if not bj.fixed:
            self.loads.add_at(spec.j, bj, -force, pj)

    def _pose(self, k: int):
        plane = self._posed.get(k)
        if plane is not None:
            return plane, None, None
        body = self.bodies[k]
        return body.shape, body.position, body.rotation

    def _spin_stiffness(self, spec, bi, bj, pi, pj, depth, big_n, r_eff):
        """(K_psi, curvature) for the pair, or (None, None) when spin friction is off."""
        params = spec.friction
        if params.spin_model == "empirical":
            if params.eta_psi == 0.0:
                return None, None
            curvature = params.spin_curvature
            if curvature is None:
                curvature = _mean_curvature(bi, pi) + _mean_curvature(bj, pj)
            return derive_spin_stiffness(params.k_e, eta_psi=params.eta_psi,
                                         curvature=curvature), curvature
        if isinstance(spec.normal, nm.Hertzian):
            a = nm.contact_patch_radius(r_eff, max(depth, 0.0))
        elif spec.patch_model is not None:
            a = nm.static_patch_radius(spec.patch_model.material_i, spec.patch_model.material_j,
                                       r_eff, big_n)
        else:
            raise ValueError("patch-based spin stiffness needs Hertz materials")
        if a == 0.0:
            return None, None
        return derive_spin_stiffness(params.k_e, patch_radius=a), 1.0 / a

    def _legacy_roll(self, spec, bi, bj, pi, pj, n, big_n, report):
        params = spec.friction
        for side in (0, 1):
            body, other = (bi, bj) if side == 0 else (bj, bi)
            if body.fixed:
                continue
            w_rel = body.omega - other.omega
            w_rel = w_rel - dot(w_rel, n) * n
            mag = norm(w_rel)
            direction = cross(n, w_rel) / mag if mag > 0.0 else None
            point, other_point = (pi, pj) if side == 0 else (pj, pi)
            k_sum = (_curvature_along(body, point, direction)
                     + _curvature_along(other, other_point, direction))
            r_eff = 1.0 / k_sum
            torque = legacy_roll_torque(w_rel, params.mu_r, r_eff, big_n,
                                        guarded=params.legacy_guard)
            k = spec.i if side == 0 else spec.j
            self.loads.torque[k] += torque
            if side == 0:
                report.roll_elastic_i = torque
            else:
                report.roll_elastic_j = torque

    @staticmethod
    def _store(state: PairState, bi: Body, bj: Body, pi, pj, frame: ContactFrame):
        ri_t, rj_t = bi.rotation.T, bj.rotation.T
        state.c_i = ri_t @ (pi - bi.position)
        state.c_j = rj_t @ (pj - bj.position)
        state.u_i, state.w_i = ri_t @ frame.u, ri_t @ frame.w
        state.u_j, state.w_j = rj_t @ frame.u, rj_t @ frame.w

    # -- integration -----------------------------------------------------------

    def integrate(self, dt: float):
        """Advance all free bodies by one step using the accumulated loads."""
        if not dt > 0:
            raise ValueError("dt must be positive")
        force, torque = self.loads.force, self.loads.torque
        if not math.isfinite(float(force.sum()) + float(torque.sum())):
            raise NumericalError(f"non-finite contact loads at t={self.time:.6g}")
        for k, body in enumerate(self.bodies):
            if not body.fixed:
                integrate_body(body, force[k], torque[k], self.gravity, dt)
        self.steps += 1
        self.time += dt

    def step(self, dt: float) -> List[ContactReport]:
        reports = self.contact_step(dt)
        self.integrate(dt)
        return reports


def integrate_body(body: Body, force, torque, gravity, dt: float):
    """Half-implicit update of one free body in place."""
    rot = body.rotation
    v = body.velocity + dt * (gravity + force / body.mass)
    if body.constraint is Constraint.TRANSLATION:
        w = np.zeros(3)
    else:
        w0 = body.omega
        w_local = rot.T @ w0
        t_local = rot.T @ torque - cross(w_local, body.inertia * w_local)
        w = w0 + dt * (rot @ (t_local / body.inertia))
    if body.constraint is Constraint.PLANAR_XZ:
        v[1] = 0.0
        w = np.array((0.0, w[1], 0.0))
    body.velocity = v
    body.omega = w
    body.position = body.position + dt * v
    if w[0] != 0.0 or w[1] != 0.0 or w[2] != 0.0:
        body.orientation = quat_normalize(quat_mul(quat_from_rotvec(w * dt), body.orientation))
        body.rotation = quat_to_matrix(body.orientation)
    p = body.position
    if not math.isfinite(p[0] + p[1] + p[2] + v[0] + v[1] + v[2] + w[0] + w[1] + w[2]):
        raise NumericalError(f"body {body.name!r} state became non-finite")


# -- recording ---------------------------------------------------------------

_BODY_FIELDS = ("x", "y", "z", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "wx", "wy", "wz")
_CONTACT_FIELDS = (
    "active", "N", "depth",
    "Fe_x", "Fe_y", "Fe_z", "Fd_x", "Fd_y", "Fd_z", "S", "slide_mode",
    "Tre_i_x", "Tre_i_y", "Tre_i_z", "Trd_i_x", "Trd_i_y", "Trd_i_z", "Theta_i", "roll_mode_i",
    "Tre_j_x", "Tre_j_y", "Tre_j_z", "Trd_j_x", "Trd_j_y", "Trd_j_z", "Theta_j", "roll_mode_j",
    "Tse", "Tsd", "Psi", "spin_mode", "psi",
)


def column_names(world: World) -> List[str]:
    names = ["t"]
    for body in world.bodies:
        if not body.fixed:
            names += [f"{body.name}.{f}" for f in _BODY_FIELDS]
    for spec in world.contacts:
        names += [f"{spec.name}.{f}" for f in _CONTACT_FIELDS]
    return names


def _mode_code(mode: Mode) -> float:
    return 0.0 if mode is Mode.STATIC else 1.0


def record_row(world: World, t: float, reports: Sequence[ContactReport]) -> List[float]:
    row = [t]
    for body in world.bodies:
        if not body.fixed:
            row += [*body.position, *body.orientation, *body.velocity, *body.omega]
    for r in reports:
        row += [float(r.active), r.normal_force, r.depth, *r.slide_elastic, *r.slide_damping,
                r.slide_history, _mode_code(r.slide_mode),
                *r.roll_elastic_i, *r.roll_damping_i, r.roll_history_i, _mode_code(r.roll_mode_i),
                *r.roll_elastic_j, *r.roll_damping_j, r.roll_history_j, _mode_code(r.roll_mode_j),
                r.spin_elastic, r.spin_damping, r.spin_history, _mode_code(r.spin_mode),
                r.spin_angle]
    return row


@dataclass
class TimeSeries:
    """Recorded trajectory: one row per recorded step, columns named by :func:`column_names`.

    Each row holds the state at the start of a step together with the
    contact loads evaluated from that state.
    """

    columns: List[str]
    data: np.ndarray

    def __post_init__(self):
        self._index = {name: k for k, name in enumerate(self.columns)}

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, self._index[name]]

    def __len__(self) -> int:
        return self.data.shape[0]


def simulate(world: World, dt: float, duration: float, every: int = 1,
             stop: Optional[Callable[[World, List[ContactReport]], bool]] = None) -> TimeSeries:
    """Run ``world`` for ``duration`` seconds, recording every ``every`` steps.

    ``stop`` is called after each recorded step and may end the run early.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not duration > 0:
        raise ValueError("duration must be positive")
    if every < 1:
        raise ValueError("every must be at least 1")
    n_steps = int(round(duration / dt))
    rows = []
    start = world.steps
    for k in range(n_steps):
        t = (start + k) * dt
        reports = world.contact_step(dt)
        recorded = k % every == 0 or k == n_steps - 1
        if recorded:
            rows.append(record_row(world, t, reports))
        world.integrate(dt)
        if recorded and stop is not None and stop(world, reports):
            break
    return TimeSeries(column_names(world), np.asarray(rows, dtype=float))
