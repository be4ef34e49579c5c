"""History-based slide, roll and spin friction for rigid-body contact."""

from .dynamics import Body, Constraint, ContactSpec, NumericalError, TimeSeries, World, simulate
from .friction import DampingMode, FrictionParams, Mode
from .geometry import Box, Disk2D, Ellipsoid, Plane, Sphere
from .normal import Analytic, Hertzian, Hookean, Material
from .oracles import SteadyState, brick_incline_analytic, classify_sphere_incline

__version__ = "0.1.0"

__all__ = [
    "Analytic", "Body", "Box", "Constraint", "ContactSpec", "DampingMode", "Disk2D",
    "Ellipsoid", "FrictionParams", "Hertzian", "Hookean", "Material", "Mode", "NumericalError",
    "Plane", "Sphere", "SteadyState", "TimeSeries", "World", "brick_incline_analytic",
    "classify_sphere_incline", "simulate",
]
