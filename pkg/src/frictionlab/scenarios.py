"""Ready-made experiments: bodies, contacts and the quantities read off them.

Every builder returns a :class:`Setup` holding a fresh :class:`World` plus
run settings.  Analysis helpers condense a :class:`TimeSeries` into the
handful of numbers each experiment is judged on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import geometry as geo
from . import normal as nm
from .dynamics import Body, Constraint, ContactSpec, TimeSeries, World, simulate
from .friction import GRAVITY, FrictionParams, Mode
from .oracles import SteadyState, classify_sphere_incline, classify_trajectory
from .rotation import quat_from_axis_angle, quat_to_matrix

SCENARIOS = (
    "brick_incline",
    "disk_rolling",
    "sphere_incline",
    "spinning_sphere",
    "spinning_ellipsoid",
    "ellipsoid_falling",
    "stacking",
)


@dataclass
class Setup:
    world: World
    dt: float
    duration: float
    every: int = 1
    stop: Optional[Callable] = None
    info: Dict[str, float] = field(default_factory=dict)

    def run(self) -> TimeSeries:
        return simulate(self.world, self.dt, self.duration, self.every, self.stop)


def _ground() -> Body:
    return Body(geo.Plane(), fixed=True, name="ground")


def _incline_gravity(alpha: float, g: float) -> Tuple[float, float, float]:
    # the slope is the plane z = 0 with +x pointing up-slope
    return (-g * math.sin(alpha), 0.0, -g * math.cos(alpha))


def _friction(defaults: dict, overrides: Optional[dict]) -> FrictionParams:
    merged = dict(defaults)
    merged.update(overrides or {})
    return FrictionParams(**merged)


def solid_sphere_inertia(mass: float, radius: float) -> float:
    return 0.4 * mass * radius * radius


def ellipsoid_inertia(mass: float, semi_axes) -> Tuple[float, float, float]:
    a, b, c = semi_axes
    return (mass * (b * b + c * c) / 5.0, mass * (a * a + c * c) / 5.0,
            mass * (a * a + b * b) / 5.0)


# -- brick -------------------------------------------------------------------

BRICK_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5, k_d=632.0)


def brick_incline(alpha: float = 0.18, mass: float = 1.0, half_extents=(0.1, 0.05, 0.05),
                  dt: float = 1e-4, duration: float = 2.0, every: int = 1,
                  friction: Optional[dict] = None, g: float = GRAVITY) -> Setup:
    """Brick released at rest on a slope of ``alpha`` rad; it translates only."""
    params = _friction(BRICK_FRICTION, friction)
    brick = Body(geo.Box(half_extents), mass=mass, inertia=(1.0, 1.0, 1.0),
                 position=(0.0, 0.0, half_extents[2]), constraint=Constraint.TRANSLATION,
                 name="brick")
    gravity = _incline_gravity(alpha, g)
    normal = nm.Analytic(mass * -gravity[2])
    world = World([_ground(), brick], [ContactSpec(0, 1, params, normal, name="c")], gravity)
    return Setup(world, dt, duration, every, info={"alpha": alpha, "mass": mass})


# -- disk --------------------------------------------------------------------

DISK_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5, k_d=1414.21, eta_r=0.4,
                     roll_stiffness=1600.0, roll_damping=25.30, mu_r=0.1)


def disk_rolling(v0: float = 5.0, omega0: float = 0.0, mass: float = 5.0, radius: float = 0.2,
                 inertia: float = 0.1, dt: float = 1e-4, duration: float = 14.0, every: int = 1,
                 friction: Optional[dict] = None, g: float = GRAVITY) -> Setup:
    """Planar disk launched along +x on level ground.

    ``omega0`` is the rolling rate (positive rolls toward +x), i.e. the
    y component of the angular velocity.
    """
    params = _friction(DISK_FRICTION, friction)
    disk = Body(geo.Disk2D(radius), mass=mass, inertia=(0.5 * inertia, inertia, 0.5 * inertia),
                position=(0.0, 0.0, radius), velocity=(v0, 0.0, 0.0),
                omega=(0.0, omega0, 0.0), constraint=Constraint.PLANAR_XZ, name="disk")
    world = World([_ground(), disk], [ContactSpec(0, 1, params, nm.Analytic(mass * g), name="c")],
                  (0.0, 0.0, -g))
    return Setup(world, dt, duration, every, info={"radius": radius})


# -- sphere on incline -------------------------------------------------------

SPHERE_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5, eta_r=0.3)


def sphere_incline(alpha_deg: float = 35.0, v0: float = 0.5, omega0: float = 0.0,
                   mass: float = 5.0, radius: float = 0.2, dt: float = 1e-4,
                   duration: float = 1.0, every: int = 1, friction: Optional[dict] = None,
                   g: float = GRAVITY) -> Setup:
    """Sphere launched up a slope at ``v0`` (the slope rises along +x)."""
    params = _friction(SPHERE_FRICTION, friction)
    alpha = math.radians(alpha_deg)
    inertia = solid_sphere_inertia(mass, radius)
    sphere = Body(geo.Sphere(radius), mass=mass, inertia=(inertia,) * 3,
                  position=(0.0, 0.0, radius), velocity=(v0, 0.0, 0.0),
                  omega=(0.0, omega0, 0.0), name="sphere")
    gravity = _incline_gravity(alpha, g)
    normal = nm.Analytic(mass * -gravity[2])
    world = World([_ground(), sphere], [ContactSpec(0, 1, params, normal, name="c")], gravity)
    return Setup(world, dt, duration, every, info={"alpha": alpha, "radius": radius})


# -- spinning bodies ---------------------------------------------------------

SPIN_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5, eta_psi=0.006, spin_curvature=5.0)
STEEL = nm.Material(2e11, 0.3)


def spinning_sphere(omega0: float = 1.0, mass: Optional[float] = 5.0, radius: float = 0.2,
                    density: Optional[float] = None, youngs_modulus: float = 2e11,
                    poisson_ratio: float = 0.3, dt: float = 1e-4, duration: float = 8.0,
                    every: int = 1, friction: Optional[dict] = None,
                    g: float = GRAVITY) -> Setup:
    """Sphere spinning about the vertical on level ground.

    With ``density`` given the mass follows from the volume.  The material
    constants feed the contact-patch spin model (the ground is rigid).
    """
    params = _friction(SPIN_FRICTION, friction)
    if density is not None:
        mass = density * 4.0 / 3.0 * math.pi * radius ** 3
    inertia = solid_sphere_inertia(mass, radius)
    sphere = Body(geo.Sphere(radius), mass=mass, inertia=(inertia,) * 3,
                  position=(0.0, 0.0, radius), omega=(0.0, 0.0, omega0), name="sphere")
    patch = nm.Hertzian(nm.Material(youngs_modulus, poisson_ratio))
    contact = ContactSpec(0, 1, params, nm.Analytic(mass * g), patch_model=patch, name="c")
    world = World([_ground(), sphere], [contact], (0.0, 0.0, -g))
    return Setup(world, dt, duration, every, info={"mass": mass, "inertia": inertia})


ELLIPSOID_SPIN_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=5e6, spin_model="hertzian")


def spinning_ellipsoid(orientation: str = "upright", omega0: float = 1.0,
                       semi_axes=(0.02, 0.02, 0.05), density: float = 8000.0,
                       youngs_modulus: float = 2e11, poisson_ratio: float = 0.3,
                       dt: float = 1e-4, duration: float = 3.0, every: int = 1,
                       friction: Optional[dict] = None, g: float = GRAVITY) -> Setup:
    """Steel ellipsoid spun about the vertical, standing on its pole or lying flat."""
    params = _friction(ELLIPSOID_SPIN_FRICTION, friction)
    a, b, c = semi_axes
    mass = density * 4.0 / 3.0 * math.pi * a * b * c
    if orientation == "upright":
        q = quat_from_axis_angle((1.0, 0.0, 0.0), 0.0)
        height = c
    elif orientation == "flat":
        q = quat_from_axis_angle((1.0, 0.0, 0.0), 0.5 * math.pi)
        height = b
    else:
        raise ValueError(f"orientation must be 'upright' or 'flat', got {orientation!r}")
    body = Body(geo.Ellipsoid(semi_axes), mass=mass, inertia=ellipsoid_inertia(mass, semi_axes),
                position=(0.0, 0.0, height), orientation=q, omega=(0.0, 0.0, omega0),
                name="ellipsoid")
    patch = nm.Hertzian(nm.Material(youngs_modulus, poisson_ratio))
    contact = ContactSpec(0, 1, params, nm.Analytic(mass * g), patch_model=patch, name="c")
    world = World([_ground(), body], [contact], (0.0, 0.0, -g))
    return Setup(world, dt, duration, every, info={"mass": mass})


# -- ellipsoid falling over --------------------------------------------------

ELLIPSOID_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5, k_d=1414.21, eta_r=0.2)


def ellipsoid_falling(mass: float = 5.0, semi_axes=(0.2, 0.2, 0.5), vy0: float = 0.3,
                      k_n: float = 1e7, normal_damping_ratio: float = 1.0, dt: float = 1e-4,
                      duration: float = 3.0, every: int = 1, friction: Optional[dict] = None,
                      g: float = GRAVITY) -> Setup:
    """Ellipsoid standing on its long axis, nudged sideways along +y."""
    params = _friction(ELLIPSOID_FRICTION, friction)
    body = Body(geo.Ellipsoid(semi_axes), mass=mass, inertia=ellipsoid_inertia(mass, semi_axes),
                position=(0.0, 0.0, semi_axes[2]), velocity=(0.0, vy0, 0.0), name="ellipsoid")
    damping = normal_damping_ratio * 2.0 * math.sqrt(k_n * mass)
    contact = ContactSpec(0, 1, params, nm.Hookean(k_n, damping), name="c")
    world = World([_ground(), body], [contact], (0.0, 0.0, -g))
    return Setup(world, dt, duration, every)


def long_axis_tilt(series: TimeSeries, name: str = "ellipsoid") -> np.ndarray:
    """Angle (deg) between the body's third axis and the vertical, per sample."""
    q = np.stack([series[f"{name}.{c}"] for c in ("qw", "qx", "qy", "qz")], axis=1)
    z = np.array([quat_to_matrix(row)[2, 2] for row in q])
    return np.degrees(np.arccos(np.clip(np.abs(z), 0.0, 1.0)))


# -- stacking ----------------------------------------------------------------

STACK_FRICTION = dict(mu_s=0.25, mu_k=0.2, k_e=1e5)


def stacking(m_top: float = 1.0, eta_r: float = 0.23, radius: float = 0.15,
             m_bottom: float = 1.0, gap: float = 0.3, youngs_modulus: float = 2e6,
             poisson_ratio: float = 0.3, restitution: float = 0.4, dt: float = 1e-4,
             duration: float = 2.0, every: int = 1, friction: Optional[dict] = None,
             collapse_drop: float = 0.3, settle_after: float = 0.25,
             g: float = GRAVITY) -> Setup:
    """Two spheres on the ground ``gap * radius`` apart with a third laid on top.

    All three spheres move in the x-z plane; out of plane the top sphere
    sits on a saddle and would roll off sideways.

    The run stops early once the top sphere has dropped by
    ``collapse_drop * radius`` (collapse) or once every body is at rest
    after ``settle_after`` seconds (stable).
    """
    params = _friction(dict(STACK_FRICTION, eta_r=eta_r), friction)
    r = radius
    half = 0.5 * (2.0 + gap) * r
    top_z = r + math.sqrt(4.0 * r * r - half * half)
    i_b = solid_sphere_inertia(m_bottom, r)
    i_t = solid_sphere_inertia(m_top, r)
    bodies = [
        _ground(),
        Body(geo.Sphere(r), mass=m_bottom, inertia=(i_b,) * 3, position=(-half, 0.0, r),
             constraint=Constraint.PLANAR_XZ, name="left"),
        Body(geo.Sphere(r), mass=m_bottom, inertia=(i_b,) * 3, position=(half, 0.0, r),
             constraint=Constraint.PLANAR_XZ, name="right"),
        Body(geo.Sphere(r), mass=m_top, inertia=(i_t,) * 3, position=(0.0, 0.0, top_z),
             constraint=Constraint.PLANAR_XZ, name="top"),
    ]
    material = nm.Material(youngs_modulus, poisson_ratio)
    ground_model = nm.Hertzian(material, None, restitution)
    pair_model = nm.Hertzian(material, material, restitution)
    contacts = [
        ContactSpec(0, 1, params, ground_model, name="ground_left"),
        ContactSpec(0, 2, params, ground_model, name="ground_right"),
        ContactSpec(1, 3, params, pair_model, name="left_top"),
        ContactSpec(2, 3, params, pair_model, name="right_top"),
    ]
    world = World(bodies, contacts, (0.0, 0.0, -g))
    drop_limit = collapse_drop * r

    def stop(w: World, reports) -> bool:
        if w.bodies[3].position[2] < top_z - drop_limit:
            return True
        if w.time < settle_after:
            return False
        return all(float(np.max(np.abs(b.velocity))) < 1e-4 and float(np.max(np.abs(b.omega))) < 1e-3
                   for b in w.bodies[1:])

    return Setup(world, dt, duration, every, stop,
                 info={"top_z": top_z, "drop_limit": drop_limit})


@dataclass
class StackOutcome:
    collapsed: bool
    ground_slide_mode: Optional[Mode] = None
    ground_roll_mode: Optional[Mode] = None


def stacking_outcome(setup: Setup, series: TimeSeries, onset: float = 0.05) -> StackOutcome:
    """Collapse verdict and the ground-contact modes when the top has dropped ``onset * R``."""
    top_z = setup.info["top_z"]
    drop = top_z - series["top.z"]
    # the stop test sees the post-step state, one step past the last recorded row
    final_drop = top_z - float(setup.world.bodies[3].position[2])
    collapsed = bool(max(final_drop, drop[-1]) > setup.info["drop_limit"])
    if not collapsed:
        return StackOutcome(False)
    radius = setup.world.bodies[3].shape.radius
    k = int(np.argmax(drop > onset * radius))
    slide = Mode.KINETIC if series["ground_left.slide_mode"][k] > 0.5 else Mode.STATIC
    roll = Mode.KINETIC if series["ground_left.roll_mode_j"][k] > 0.5 else Mode.STATIC
    return StackOutcome(True, slide, roll)


def critical_top_mass(eta_r: float, lo: float = 0.1, hi: float = 4.0, tol: float = 0.01,
                      **kwargs) -> Tuple[float, float]:
    """Bracket ``(holds, collapses)`` of top masses no wider than ``tol``.

    ``lo`` must hold and ``hi`` must collapse; the bracket is bisected.
    """
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")

    def collapses(m: float) -> bool:
        setup = stacking(m_top=m, eta_r=eta_r, **kwargs)
        return stacking_outcome(setup, setup.run()).collapsed

    if collapses(lo) or not collapses(hi):
        raise ValueError(f"bracket [{lo}, {hi}] does not straddle the critical mass")
    while hi - lo > tol:
        mid = round(0.5 * (lo + hi), 6)
        if collapses(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# -- analysis helpers --------------------------------------------------------

def first_time(series: TimeSeries, mask: np.ndarray) -> Optional[float]:
    idx = np.flatnonzero(mask)
    return float(series["t"][idx[0]]) if idx.size else None


def stick_transition_time(series: TimeSeries, contact: str = "c",
                          after: float = 0.0) -> Optional[float]:
    """First time after the slide channel has gone kinetic that it is back in stick."""
    t = series["t"]
    mode = series[f"{contact}.slide_mode"]
    kinetic = np.flatnonzero((mode > 0.5) & (t >= after))
    if not kinetic.size:
        return None
    back = np.flatnonzero((mode < 0.5) & (np.arange(len(t)) > kinetic[0]))
    return float(t[back[0]]) if back.size else None


def phase_sequence(series: TimeSeries, contact: str = "c", body: str = "sphere",
                   min_duration: float = 1e-3) -> List[str]:
    """Sphere-on-slope phases in order of appearance.

    ``slide-kinetic`` while the slide channel slips, ``roll-up`` / ``roll-down``
    while it sticks with the centre moving up or down the slope.  Runs
    shorter than ``min_duration`` seconds are ignored.
    """
    t = series["t"]
    v = series[f"{body}.vx"]
    slide = series[f"{contact}.slide_mode"]
    labels = np.where(slide > 0.5, 0, np.where(v >= 0.0, 1, 2))
    names = ("slide-kinetic", "roll-up", "roll-down")
    phases: List[str] = []
    start = 0
    for k in range(1, len(labels) + 1):
        if k == len(labels) or labels[k] != labels[start]:
            end = t[k] if k < len(t) else t[-1]
            if end - t[start] >= min_duration:
                name = names[labels[start]]
                if not phases or phases[-1] != name:
                    phases.append(name)
            start = k
    return phases


def incline_steady_state(series: TimeSeries, radius: float, window: float = 0.1,
                         contact: str = "c", body: str = "sphere") -> SteadyState:
    t = series["t"]
    sel = t >= t[-1] - window
    return classify_trajectory(series[f"{body}.vx"][sel], series[f"{body}.wy"][sel], radius,
                               series[f"{contact}.slide_mode"][sel] < 0.5)


@dataclass
class PhaseMapRow:
    alpha_deg: float
    eta_r: float
    simulated: SteadyState
    oracle: SteadyState

    @property
    def agree(self) -> bool:
        return self.simulated is self.oracle


def classify_incline_run(setup: Setup, window: float = 0.1) -> PhaseMapRow:
    """Run a sphere-on-slope setup and classify it alongside the oracle."""
    series = setup.run()
    params = setup.world.contacts[0].friction
    alpha = setup.info["alpha"]
    simulated = incline_steady_state(series, setup.info["radius"], window)
    oracle = classify_sphere_incline(alpha, params.mu_s, params.mu_k, params.eta_r)
    return PhaseMapRow(math.degrees(alpha), params.eta_r, simulated, oracle)


def phase_map_point(alpha_deg: float, eta_r: float, duration: float = 1.0,
                    friction: Optional[dict] = None, every: int = 10,
                    **kwargs) -> PhaseMapRow:
    """Simulate one (alpha, eta_r) cell and classify it alongside the oracle."""
    overrides = dict(friction or {})
    overrides["eta_r"] = eta_r
    setup = sphere_incline(alpha_deg=alpha_deg, duration=duration, every=every,
                           friction=overrides, **kwargs)
    row = classify_incline_run(setup)
    row.alpha_deg = alpha_deg
    return row


def boundary_cells(oracle_grid: np.ndarray) -> np.ndarray:
    """Cells whose oracle class differs from an edge neighbour's."""
    rows, cols = oracle_grid.shape
    edge = np.zeros_like(oracle_grid, dtype=bool)
    for r in range(rows):
        for c in range(cols):
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols and oracle_grid[rr, cc] != oracle_grid[r, c]:
                    edge[r, c] = True
    return edge
