"""Casimir torque and lateral force between corrugated metallic plates."""
from .lifshitz import (
    energy_first_derivative,
    energy_per_area,
    energy_second_derivative,
    plane_energy,
)
from .mirrors import EvaluationPoint, nonspecular_first_order, specular_reflection
from .model import Geometry, Material, MaterialKind, validate
from .observables import (
    energy_correction,
    landscape_grid,
    lateral_force,
    optimal_wavenumber,
    stability_classify,
    sweep_k,
    torque,
    torque_max,
    torque_pfa_max,
)
from .quadrature import IntegralResult, NonConvergenceError, QuadratureSpec
from .response import Method, g_pfa, g_ratio, g_scattering, g_value

__version__ = "0.1.0"
