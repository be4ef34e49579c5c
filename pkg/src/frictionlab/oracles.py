"""Closed-form reference answers for the sphere and brick on an incline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .friction import GRAVITY


class SteadyState(str, enum.Enum):
    """Terminal motion of a sphere on an incline."""

    S = "S"  # stationary
    PR = "PR"  # pure rolling
    RWS = "RwS"  # rolling with slipping
    PS = "PS"  # pure sliding


def classify_sphere_incline(alpha: float, mu_s: float, mu_k: float, eta_r: float) -> SteadyState:
    """Steady state of a sphere released on an incline of angle ``alpha`` (rad).

    Boundaries, checked in order (equalities go to the less mobile state):

    * stationary   if tan(alpha) <= 2 eta_r mu_s
    * pure sliding if eta_r >= 1/2
    * pure rolling if tan(alpha) <= 3.5 mu_s - 5 eta_r mu_k
    * otherwise rolling with slipping
    """
    if not 0.0 < alpha < 0.5 * math.pi:
        raise ValueError(f"incline angle must lie in (0, pi/2), got {alpha!r}")
    if not (mu_s >= mu_k > 0) or eta_r < 0:
        raise ValueError("need mu_s >= mu_k > 0 and eta_r >= 0")
    slope = math.tan(alpha)
    if slope <= 2.0 * eta_r * mu_s:
        return SteadyState.S
    if eta_r >= 0.5:
        return SteadyState.PS
    if slope <= 3.5 * mu_s - 5.0 * eta_r * mu_k:
        return SteadyState.PR
    return SteadyState.RWS


@dataclass(frozen=True)
class BrickOutcome:
    sticks: bool
    friction_force: float  # magnitude of the friction force along the slope (N)
    acceleration: float  # down-slope acceleration (m/s^2), zero when sticking


def brick_incline_analytic(alpha: float, mu_s: float, mu_k: float, mass: float,
                           g: float = GRAVITY) -> BrickOutcome:
    """Coulomb answer for a brick released at rest on an incline."""
    if not 0.0 <= alpha < 0.5 * math.pi:
        raise ValueError("incline angle must lie in [0, pi/2)")
    if not (mu_s >= mu_k > 0) or not mass > 0:
        raise ValueError("need mu_s >= mu_k > 0 and a positive mass")
    if math.tan(alpha) <= mu_s:
        return BrickOutcome(True, mass * g * math.sin(alpha), 0.0)
    friction = mu_k * mass * g * math.cos(alpha)
    return BrickOutcome(False, friction, g * (math.sin(alpha) - mu_k * math.cos(alpha)))


def classify_trajectory(velocity: np.ndarray, omega: np.ndarray, radius: float,
                        slide_static: Optional[np.ndarray] = None, v_tol: float = 1e-3,
                        w_tol: float = 1e-2) -> SteadyState:
    """Steady state from samples of the final stretch of a simulated run.

    ``velocity`` is the along-slope centre velocity, ``omega`` the matching
    rolling rate (positive when rolling in the +velocity direction), both
    sampled over the final window.  Pure rolling additionally requires the
    slide channel to stay in stick mode when its mode samples are given.
    """
    v_mean = float(np.mean(np.abs(velocity)))
    w_mean = float(np.mean(np.abs(omega)))
    if v_mean < v_tol and w_mean < w_tol:
        return SteadyState.S
    if w_mean < w_tol:
        return SteadyState.PS
    slip = float(np.mean(np.abs(velocity - radius * omega)))
    sticking = slide_static is None or bool(np.all(slide_static))
    if sticking and slip <= 1e-2 * max(v_mean, v_tol):
        return SteadyState.PR
    return SteadyState.RWS
