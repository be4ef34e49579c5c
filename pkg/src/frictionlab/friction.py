"""History-based slide, roll and spin friction with stick/slip modes.

Each channel accumulates a micro-deflection (slide vector S, roll vector
Theta per body, spin scalar Psi), produces an elastic load proportional to
it plus a damping load proportional to the per-step increment, and after
the step rescales the history to the static or kinetic threshold.  Only the
elastic part takes part in the yield test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

GRAVITY = 9.8


class Mode(str, enum.Enum):
    STATIC = "static"
    KINETIC = "kinetic"

    @property
    def code(self) -> str:
        return "s" if self is Mode.STATIC else "k"


class DampingMode(str, enum.Enum):
    ALWAYS = "always"
    STICK = "stick"  # damping only while the channel is in stick mode
    OFF = "off"


class RollRegime(str, enum.Enum):
    REGULAR = "regular"
    FREE = "free"  # partner is a pin tip: no stiffness, unbounded threshold
    LOCKED = "locked"  # conforming surfaces: rigid, zero threshold


@dataclass(frozen=True)
class FrictionParams:
    """Friction inputs for one contact pair.

    Optional stiffness/damping overrides replace the values derived from
    the pair's curvature, mass and inertia.
    """

    mu_s: float = 0.25
    mu_k: float = 0.2
    k_e: float = 1e5
    k_d: Optional[float] = None
    eta_r: float = 0.0
    eta_psi: float = 0.0
    spin_curvature: Optional[float] = None
    damping_enabled: bool = True
    damping_mode: DampingMode = DampingMode.STICK
    damping_ratio: float = 1.0
    spin_model: str = "empirical"
    roll_model: str = "history"
    mu_r: float = 0.0
    legacy_guard: bool = True
    roll_stiffness: Optional[float] = None
    roll_damping: Optional[float] = None
    spin_damping: Optional[float] = None

    def __post_init__(self):
        if not (self.mu_s >= self.mu_k > 0):
            raise ValueError(f"need mu_s >= mu_k > 0, got mu_s={self.mu_s}, mu_k={self.mu_k}")
        if not self.k_e > 0:
            raise ValueError("k_e must be positive")
        for name in ("k_d", "roll_stiffness", "roll_damping", "spin_damping"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.eta_r < 0 or self.eta_psi < 0 or self.mu_r < 0:
            raise ValueError("eta_r, eta_psi and mu_r must be non-negative")
        if self.spin_model not in ("empirical", "hertzian"):
            raise ValueError(f"unknown spin model {self.spin_model!r}")
        if self.roll_model not in ("history", "legacy"):
            raise ValueError(f"unknown roll model {self.roll_model!r}")
        object.__setattr__(self, "damping_mode", DampingMode(self.damping_mode))

    def with_(self, **changes) -> "FrictionParams":
        return replace(self, **changes)

    def damping_active(self, mode: Mode) -> bool:
        if not self.damping_enabled or self.damping_mode is DampingMode.OFF:
            return False
        return self.damping_mode is DampingMode.ALWAYS or mode is Mode.STATIC


@dataclass
class SlideState:
    s: np.ndarray = field(default_factory=lambda: np.zeros(2))
    mode: Mode = Mode.STATIC


@dataclass
class RollState:
    theta: np.ndarray = field(default_factory=lambda: np.zeros(2))
    mode: Mode = Mode.STATIC


@dataclass
class SpinState:
    psi: float = 0.0
    mode: Mode = Mode.STATIC


@dataclass
class ChannelLoad:
    """Elastic and damping parts of one channel's load, in contact-frame terms."""

    elastic: np.ndarray
    damping: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.elastic + self.damping


def critical_damping(stiffness: float, mass: float) -> float:
    """Damping coefficient 2*sqrt(m*K)."""
    if mass <= 0:
        raise ValueError("mass must be positive")
    if stiffness < 0:
        raise ValueError("stiffness must be non-negative")
    return 2.0 * math.sqrt(mass * stiffness)


def _magnitude(h) -> float:
    if isinstance(h, np.ndarray) and h.ndim == 1:
        return math.hypot(h[0], h[1])
    return abs(float(h))


def cap_history(history, mode: Mode, static_limit: float, kinetic_limit: float):
    """End-of-step adjustment shared by all three channels.

    static:  alpha = |h|/limit_s; alpha > 1 scales h back onto the limit and
             switches to kinetic.
    kinetic: alpha = |h|/limit_k; alpha > 1 scales h back, otherwise the
             channel returns to static.
    """
    mag = _magnitude(history)
    limit = static_limit if mode is Mode.STATIC else kinetic_limit
    if limit <= 0.0:
        if mag > 0.0:
            return history * 0.0, Mode.KINETIC
        return history, (Mode.STATIC if mode is Mode.KINETIC else mode)
    alpha = mag / limit
    if mode is Mode.STATIC:
        if alpha > 1.0:
            return history / alpha, Mode.KINETIC
        return history, mode
    if alpha > 1.0:
        return history / alpha, Mode.KINETIC
    return history, Mode.STATIC


# -- slide -------------------------------------------------------------------

def slide_thresholds(mu_s: float, mu_k: float, normal_force: float, k_e: float):
    """Static and kinetic slide micro-deflection caps mu*N/K_E."""
    return mu_s * normal_force / k_e, mu_k * normal_force / k_e


def slide_update(state: SlideState, delta_s, normal_force: float, params: FrictionParams,
                 dt: float, k_d: Optional[float] = None):
    """Advance the slide history by ``delta_s`` and return (load, new state).

    The load is expressed in contact-frame coordinates and acts on body i
    along +S (the reaction on body j is its negative).  ``k_d`` defaults to
    ``params.k_d`` (zero when unset).
    """
    if normal_force < 0:
        raise ValueError("normal force must be non-negative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not isinstance(delta_s, np.ndarray):
        delta_s = np.asarray(delta_s, dtype=float)
    s_static, s_kinetic = slide_thresholds(params.mu_s, params.mu_k, normal_force, params.k_e)
    s, mode = cap_history(state.s + delta_s, state.mode, s_static, s_kinetic)
    elastic = params.k_e * s
    if k_d is None:
        k_d = params.k_d or 0.0
    if params.damping_active(state.mode):
        damping = (k_d / dt) * delta_s
    else:
        damping = np.zeros(2)
    return ChannelLoad(elastic, damping), SlideState(s, mode)


# -- roll --------------------------------------------------------------------

def roll_regime(kappa_i: float, kappa_j: float) -> RollRegime:
    if math.isinf(kappa_i) or math.isinf(kappa_j):
        return RollRegime.FREE
    total = kappa_i + kappa_j
    if total < -1e-12 * max(abs(kappa_i), abs(kappa_j), 1.0):
        raise ValueError("curvature sum must be non-negative (kappa_j >= -kappa_i)")
    if abs(total) <= 1e-12 * max(abs(kappa_i), abs(kappa_j), 1.0):
        return RollRegime.LOCKED
    return RollRegime.REGULAR


def derive_roll_stiffness(kappa_i: float, kappa_j: float, eta_r: float,
                          k_e: float) -> Optional[float]:
    """K_R = 4 eta_r K_E / (kappa_i + kappa_j)^2.

    Returns 0.0 against a pin tip and ``None`` for conforming (mirror)
    surfaces, whose stiffness is unbounded.
    """
    regime = roll_regime(kappa_i, kappa_j)
    if regime is RollRegime.FREE:
        return 0.0
    if regime is RollRegime.LOCKED:
        return None
    return 4.0 * eta_r * k_e / (kappa_i + kappa_j) ** 2


def roll_threshold(mu: float, normal_force: float, k_e: float, kappa_i: float,
                   kappa_j: float) -> Optional[float]:
    """Theta cap mu*N*(kappa_i + kappa_j)/(2 K_E); ``None`` (unbounded) against a pin tip."""
    regime = roll_regime(kappa_i, kappa_j)
    if regime is RollRegime.FREE:
        return None
    if regime is RollRegime.LOCKED:
        return 0.0
    return mu * normal_force * (kappa_i + kappa_j) / (2.0 * k_e)


def roll_update(state: RollState, kappa_i: float, kappa_j: float, p_i, normal_force: float,
                inertia: float, params: FrictionParams, dt: float):
    """Advance one body's roll history by kappa_i * p_i; return (load, new state).

    Loads are "rocking" 2-vectors along Theta in frame coordinates with
    torque units; :func:`rocking_torque` turns them into world torques.
    """
    if normal_force < 0:
        raise ValueError("normal force must be non-negative")
    increment = kappa_i * np.asarray(p_i, dtype=float)
    regime = roll_regime(kappa_i, kappa_j)
    if regime is not RollRegime.REGULAR:
        zero = np.zeros(2)
        mode = Mode.KINETIC if regime is RollRegime.FREE else Mode.STATIC
        return ChannelLoad(zero, zero.copy()), RollState(zero.copy(), mode)
    if params.roll_stiffness is not None:
        k_r = params.roll_stiffness
    else:
        k_r = derive_roll_stiffness(kappa_i, kappa_j, params.eta_r, params.k_e)
    t_static = roll_threshold(params.mu_s, normal_force, params.k_e, kappa_i, kappa_j)
    t_kinetic = roll_threshold(params.mu_k, normal_force, params.k_e, kappa_i, kappa_j)
    theta, mode = cap_history(state.theta + increment, state.mode, t_static, t_kinetic)
    elastic = k_r * theta
    if params.damping_active(state.mode) and inertia > 0:
        if params.roll_damping is not None:
            d_r = params.roll_damping
        else:
            d_r = params.damping_ratio * critical_damping(k_r, inertia)
        damping = (d_r / dt) * increment
    else:
        damping = np.zeros(2)
    return ChannelLoad(elastic, damping), RollState(theta, mode)


def rocking_torque(rocking, frame, outward_normal) -> np.ndarray:
    """World torque for a rocking 2-vector: outward_normal x (rocking in world)."""
    v = rocking[0] * frame.u + rocking[1] * frame.w
    n = outward_normal
    return np.array((n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2],
                     n[0] * v[1] - n[1] * v[0]))


def legacy_roll_torque(omega_rel, mu_r: float, r_eff: float, normal_force: float,
                       guarded: bool = True) -> np.ndarray:
    """Constant-magnitude rolling torque -omega_hat * mu_r * R_eff * F_n.

    With ``guarded`` the torque vanishes for |omega_rel| < 1e-14; without it
    only an exactly zero rate yields zero torque, so the direction flips
    with every sign change of a vanishing rate.
    """
    if normal_force < 0:
        raise ValueError("normal force must be non-negative")
    omega_rel = np.asarray(omega_rel, dtype=float)
    mag = float(np.linalg.norm(omega_rel))
    if mag == 0.0 or (guarded and mag < 1e-14):
        return np.zeros_like(omega_rel)
    return -(omega_rel / mag) * (mu_r * r_eff * normal_force)


# -- spin --------------------------------------------------------------------

def spin_thresholds(curvature: float, mu_s: float, mu_k: float, normal_force: float,
                    k_e: float):
    """Static and kinetic spin caps curvature * mu * N / K_E."""
    s_static, s_kinetic = slide_thresholds(mu_s, mu_k, normal_force, k_e)
    return curvature * s_static, curvature * s_kinetic


def derive_spin_stiffness(k_e: float, *, eta_psi: Optional[float] = None,
                          curvature: Optional[float] = None,
                          patch_radius: Optional[float] = None) -> float:
    """Spin stiffness from either the empirical or the contact-patch route.

    empirical: K_psi = eta_psi * K_E / curvature**2
    patch:     K_psi = a**2 * K_E / 2   (same as empirical with eta_psi = 1/2, curvature = 1/a)
    """
    if patch_radius is not None:
        if patch_radius < 0:
            raise ValueError("patch radius must be non-negative")
        return 0.5 * patch_radius * patch_radius * k_e
    if curvature is None or eta_psi is None:
        raise ValueError("empirical spin stiffness needs eta_psi and curvature")
    if curvature <= 0:
        raise ValueError("spin curvature must be positive")
    return eta_psi * k_e / (curvature * curvature)


def spin_update(state: SpinState, psi: float, normal_force: float, inertia: float,
                params: FrictionParams, dt: float, *, curvature: float, stiffness: float):
    """Advance Psi by the step's spin angle; return (torque on body i about n, new state).

    A negative Psi yields a positive torque on body i; body j takes the
    opposite torque.  The returned :class:`ChannelLoad` holds scalars.
    """
    if normal_force < 0:
        raise ValueError("normal force must be non-negative")
    s_static, s_kinetic = spin_thresholds(curvature, params.mu_s, params.mu_k, normal_force,
                                          params.k_e)
    total, mode = cap_history(state.psi + psi, state.mode, s_static, s_kinetic)
    elastic = -stiffness * total
    if params.damping_active(state.mode) and inertia > 0:
        if params.spin_damping is not None:
            d_psi = params.spin_damping
        else:
            d_psi = params.damping_ratio * critical_damping(stiffness, inertia)
        damping = -d_psi * psi / dt
    else:
        damping = 0.0
    return ChannelLoad(float(elastic), float(damping)), SpinState(float(total), mode)
