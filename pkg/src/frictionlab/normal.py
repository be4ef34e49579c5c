"""Normal-force models: constant, linear spring and Hertzian contact."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Material:
    youngs_modulus: float
    poisson_ratio: float = 0.3

    def __post_init__(self):
        if not self.youngs_modulus > 0:
            raise ValueError("Young's modulus must be positive")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ValueError("Poisson ratio must lie in [0, 0.5)")

    @property
    def plane_strain_modulus(self) -> float:
        """E* = E / (1 - nu^2)."""
        return self.youngs_modulus / (1.0 - self.poisson_ratio ** 2)


@dataclass(frozen=True)
class Analytic:
    """Prescribed constant normal force."""

    force: float

    def __post_init__(self):
        if self.force < 0:
            raise ValueError("normal force must be non-negative")


@dataclass(frozen=True)
class Hookean:
    """Linear spring k_n * depth, with an optional viscous term c_n * depth rate."""

    k_n: float
    damping: float = 0.0

    def __post_init__(self):
        if not self.k_n > 0:
            raise ValueError("k_n must be positive")
        if self.damping < 0:
            raise ValueError("normal damping must be non-negative")


@dataclass(frozen=True)
class Hertzian:
    """Hertz contact between two materials; ``material_j=None`` means a rigid partner."""

    material_i: Material
    material_j: Optional[Material] = None
    restitution: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.restitution <= 1.0:
            raise ValueError("restitution must lie in [0, 1]")

    @property
    def effective_modulus(self) -> float:
        return effective_modulus(self.material_i, self.material_j)


NormalModel = Union[Analytic, Hookean, Hertzian]


def hookean_normal(k_n: float, depth: float) -> float:
    """k_n * max(depth, 0); separated bodies exert no force."""
    return k_n * max(depth, 0.0)


def effective_modulus(material_i: Material, material_j: Optional[Material] = None) -> float:
    """Series combination of the two E*; a rigid partner leaves E* of the deformable body."""
    e_i = material_i.plane_strain_modulus
    if material_j is None:
        return e_i
    e_j = material_j.plane_strain_modulus
    return e_i * e_j / (e_i + e_j)


def hertz_stiffness(material_i: Material, material_j: Optional[Material], r_eff: float) -> float:
    """k_Hz = 4/3 E_eff sqrt(R_eff)."""
    if r_eff < 0:
        raise ValueError("effective radius must be non-negative")
    return 4.0 / 3.0 * effective_modulus(material_i, material_j) * math.sqrt(r_eff)


def restitution_damping_ratio(restitution: float) -> float:
    """beta = ln e / sqrt(ln^2 e + pi^2), negative for e < 1 and -1 for e = 0."""
    if not 0.0 <= restitution <= 1.0:
        raise ValueError("restitution must lie in [0, 1]")
    if restitution == 0.0:
        return -1.0
    log_e = math.log(restitution)
    return log_e / math.sqrt(log_e * log_e + math.pi * math.pi)


def hertz_normal(k_hz: float, depth: float, depth_rate: float = 0.0, restitution: float = 1.0,
                 e_eff: Optional[float] = None, r_eff: Optional[float] = None,
                 mass: Optional[float] = None) -> float:
    """Hertz force k_Hz * depth^1.5 plus a restitution-calibrated viscous term.

    The viscous term -2 sqrt(5/6) beta sqrt(S_n m) * depth_rate, with
    S_n = 2 E_eff sqrt(R_eff depth), is only added when ``e_eff``,
    ``r_eff`` and ``mass`` are all given.  The result is clamped at zero.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0.0:
        return 0.0
    force = k_hz * depth * math.sqrt(depth)
    if restitution < 1.0 and None not in (e_eff, r_eff, mass):
        s_n = 2.0 * e_eff * math.sqrt(r_eff * depth)
        beta = restitution_damping_ratio(restitution)
        force -= 2.0 * math.sqrt(5.0 / 6.0) * beta * math.sqrt(s_n * mass) * depth_rate
    return max(force, 0.0)


def hertz_static_depth(k_hz: float, load: float) -> float:
    """Depth at which the elastic Hertz force balances ``load``: (load / k_Hz)^(2/3)."""
    if load < 0 or k_hz <= 0:
        raise ValueError("need load >= 0 and k_Hz > 0")
    return (load / k_hz) ** (2.0 / 3.0)


def contact_patch_radius(r_eff: float, depth: float) -> float:
    """a = sqrt(R_eff * depth)."""
    if r_eff < 0 or depth < 0:
        raise ValueError("R_eff and depth must be non-negative")
    return math.sqrt(r_eff * depth)


def static_patch_radius(material_i: Material, material_j: Optional[Material], r_eff: float,
                        load: float) -> float:
    """Patch radius of a Hertz contact carrying ``load`` at rest."""
    k_hz = hertz_stiffness(material_i, material_j, r_eff)
    return contact_patch_radius(r_eff, hertz_static_depth(k_hz, load))


def evaluate(model: NormalModel, depth: float, depth_rate: float = 0.0,
             r_eff: Optional[float] = None, mass: Optional[float] = None) -> float:
    """Normal force of ``model`` at the given penetration and penetration rate."""
    if isinstance(model, Analytic):
        return model.force
    if depth <= 0.0:
        return 0.0
    if isinstance(model, Hookean):
        return max(model.k_n * depth + model.damping * depth_rate, 0.0)
    if r_eff is None:
        raise ValueError("Hertzian contact needs the effective radius")
    k_hz = hertz_stiffness(model.material_i, model.material_j, r_eff)
    return hertz_normal(k_hz, depth, depth_rate, model.restitution,
                        model.effective_modulus, r_eff, mass)
