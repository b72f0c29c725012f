"""Casimir energy per unit area between flat parallel plates at zero temperature.

    e_PP(L) = hbar/(2 pi) int_0^inf dxi int d^2k/(2 pi)^2
              sum_p ln(1 - r_p**2 exp(-2 kappa L))

The separation derivatives are taken under the integral sign.  In scaled
variables (lengths in units of L, frequencies in units of c/L) the azimuth
of ``k`` integrates out and

    e_PP = hbar c / (4 pi**2 L**3) int dXi int K dK sum_p ln(1 - x_p),

with ``x_p = r_p**2 exp(-2 kappa)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mirrors import _scaled_wp, _specular
from .model import C, HBAR, Material
from .quadrature import IntegralResult, QuadratureSpec, integrate_half_line

DEFAULT_SPEC = QuadratureSpec(rel_tol=1e-7, transform_scale=0.5)


def perfect_energy_per_area(L: float) -> float:
    """-pi**2 hbar c / (720 L**3)."""
    return -math.pi**2 * HBAR * C / (720.0 * L**3)


def perfect_energy_first_derivative(L: float) -> float:
    return 3.0 * math.pi**2 * HBAR * C / (720.0 * L**4)


def perfect_energy_second_derivative(L: float) -> float:
    """-pi**2 hbar c / (60 L**5)."""
    return -math.pi**2 * HBAR * C / (60.0 * L**5)


def _integrand(order: int, wp: float):
    """Scaled integrand over (xi, k) for the ``order``-th L-derivative."""

    def f(xi, k):
        kap, r_te, r_tm = _specular(k, xi, wp)
        decay = np.exp(-2.0 * kap)
        total = 0.0
        for r in (r_te, r_tm):
            x = r * r * decay
            if order == 0:
                total = total + np.log1p(-x)
            elif order == 1:
                total = total + 2.0 * kap * x / (1.0 - x)
            else:
                total = total - 4.0 * kap * kap * x / (1.0 - x) ** 2
        return total * k

    return f


def _double_integral(order: int, L: float, material: Material, spec: QuadratureSpec) -> IntegralResult:
    wp = _scaled_wp(material, L)
    f = _integrand(order, wp)
    inner_spec = spec.with_(rel_tol=0.25 * spec.rel_tol)
    worst = {"rel": 0.0, "ok": True}

    def outer(xis):
        out = np.empty_like(xis)
        for i, xi in enumerate(xis):
            res = integrate_half_line(lambda k: f(xi, k), inner_spec, scale=spec.transform_scale)
            out[i] = res.value
            if res.value:
                worst["rel"] = max(worst["rel"], res.error_estimate / abs(res.value))
            worst["ok"] &= res.converged
        return out

    res = integrate_half_line(outer, spec.with_(rel_tol=0.75 * spec.rel_tol), scale=spec.transform_scale)
    err = res.error_estimate + worst["rel"] * abs(res.value)
    return IntegralResult(res.value, err, res.evaluations, res.converged and worst["ok"])


def _physical(order: int, L: float, material: Material, spec) -> tuple:
    if not L > 0:
        raise ValueError(f"non-positive separation: {L!r}")
    spec = DEFAULT_SPEC if spec is None else spec
    res = _double_integral(order, L, material, spec).require(f"plane energy derivative {order}")
    prefactor = HBAR * C / (4.0 * math.pi**2 * L ** (3 + order))
    return float(prefactor * res.value), float(prefactor * res.error_estimate)


def energy_per_area(L: float, material: Material, spec: QuadratureSpec | None = None) -> float:
    """Casimir energy per unit area e_PP(L) (J/m^2), by quadrature."""
    return _physical(0, L, material, spec)[0]


def energy_first_derivative(L: float, material: Material, spec: QuadratureSpec | None = None) -> float:
    """e'_PP(L) (J/m^3); minus the normal Casimir pressure, positive for attraction."""
    return _physical(1, L, material, spec)[0]


def energy_second_derivative(L: float, material: Material, spec: QuadratureSpec | None = None) -> float:
    """e''_PP(L) (J/m^4), differentiated analytically under the integral."""
    return _physical(2, L, material, spec)[0]


@dataclass(frozen=True)
class PlaneEnergyResult:
    e_pp: float
    d1: float
    d2: float
    material: Material
    L: float
    error_estimates: dict = field(default_factory=dict)


def plane_energy(L: float, material: Material, spec: QuadratureSpec | None = None) -> PlaneEnergyResult:
    """Energy and both separation derivatives with their error estimates."""
    vals = [_physical(order, L, material, spec) for order in (0, 1, 2)]
    return PlaneEnergyResult(
        e_pp=vals[0][0],
        d1=vals[1][0],
        d2=vals[2][0],
        material=material,
        L=L,
        error_estimates={"e_pp": vals[0][1], "d1": vals[1][1], "d2": vals[2][1]},
    )
