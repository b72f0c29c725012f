"""Built-in self-test: invariants plus reference-number regressions.

Each check returns a :class:`CheckResult`; ``run_checks`` runs them all and
never raises, so a broken installation still yields a full report.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lifshitz
from .model import Geometry, Material, golden_section_max, sinc_derivative, sinc_first_minimum
from .observables import energy_correction, landscape_grid, lateral_force, optimal_wavenumber, torque, torque_max
from .quadrature import QuadratureSpec
from .response import Method, g_pfa, g_ratio, g_scattering

GOLD = Material.plasma(137e-9)
PERFECT = Material.perfect()
UM = 1e-6
NM = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def reference_geometry() -> Geometry:
    return Geometry.from_product(L=100 * NM, Lx=24 * UM, Ly=24 * UM, a1a2=200 * NM**2, lambda_c=1.2 * UM)


def _within(value, target, rel):
    return abs(value / target - 1.0) <= rel


def check_headline_torque():
    res = torque_max(reference_geometry(), GOLD, Method.SCATTERING)
    return _within(res.torque_per_area, 5.2e-7, 0.05), f"tau_max = {res.torque_per_area:.4e} N/m (5.2e-7 +-5%)"


def check_optimal_wavenumber():
    k1 = optimal_wavenumber(1 * UM, GOLD)
    k2 = optimal_wavenumber(200 * NM, GOLD)
    ok = _within(k1, 2.6e6, 0.04) and _within(k2 * 200 * NM, 2.6, 0.10)
    return ok, f"k*(1um) = {k1 * UM:.4f} um^-1 (2.6 +-4%); k*L(200nm) = {k2 * 200 * NM:.4f} (2.6 +-10%)"


def check_pfa_error():
    r = 1.0 / g_ratio(2.6e6, 1 * UM, GOLD)
    return abs(r - 2.03) <= 0.05, f"G(0)/G(2.6um^-1) = {r:.4f} (2.03 +-0.05)"


def check_conductivity_error():
    r = g_scattering(2.6e6, 1 * UM, PERFECT).value / g_scattering(2.6e6, 1 * UM, GOLD).value
    return abs(r - 1.16) <= 0.02, f"perfect/plasma = {r:.4f} (1.16 +-0.02)"


def check_proximity_theorem():
    worst = 0.0
    for L in (100 * NM, 1 * UM):
        for m in (GOLD, PERFECT):
            worst = max(worst, abs(g_ratio(0.05 / L, L, m) - 1.0))
    return worst <= 0.01, f"max |G(k)/e''_PP - 1| at kL = 0.05: {worst:.2e} (<= 1e-2)"


def sinc_constants() -> tuple:
    """(torque prefactor, theta*/(lambda_c/Ly), local-minimum angle/(lambda_c/Ly)) by extremization."""
    x_star, slope = golden_section_max(lambda x: -float(sinc_derivative(x)), 0.5, 4.0, xtol=1e-12)
    # tau_max = (a1a2/2)|G| (k Ly/2) max(-sinc') = prefactor a1a2 |G| k Ly
    prefactor = 0.25 * slope
    # theta = 2x/(k Ly) = (x/pi) lambda_c/Ly
    return prefactor, x_star / math.pi, sinc_first_minimum() / math.pi


def check_sinc_constants():
    p, t_star, t_min = sinc_constants()
    ok = abs(p - 0.109) <= 0.001 and _within(t_star, 0.66, 0.01) and _within(t_min, 1.43, 0.01)
    return ok, f"prefactor = {p:.5f}, theta* = {t_star:.5f}, theta_min = {t_min:.5f} (lambda_c/Ly)"


def check_lifshitz():
    worst = 0.0
    for L in (0.1 * UM, 1 * UM, 10 * UM):
        worst = max(worst, abs(lifshitz.energy_per_area(L, PERFECT) / lifshitz.perfect_energy_per_area(L) - 1))
        worst = max(
            worst, abs(lifshitz.energy_second_derivative(L, PERFECT) / lifshitz.perfect_energy_second_derivative(L) - 1)
        )
    L = 1 * UM
    conv = abs(lifshitz.energy_per_area(L, Material.plasma(1e-3 * L)) / lifshitz.perfect_energy_per_area(L) - 1)
    ok = worst <= 1e-4 and conv < 1e-3
    return ok, f"perfect-path max rel error {worst:.2e} (<= 1e-4); plasma(L/1000) vs perfect {conv:.2e} (< 1e-3)"


def check_landscape():
    geom = reference_geometry()
    land = landscape_grid(geom, GOLD, g=-1.0)
    unit = geom.lambda_c / geom.Ly
    b0, t0 = land.argmin()
    ok = t0 == 0.0 and abs(b0 / geom.lambda_c - round(b0 / geom.lambda_c)) < 1e-12
    ok &= bool(np.array_equal(land.delta_e, land.delta_e[:, ::-1]))
    # secondary minima at (lambda_c/2, +-1.43 lambda_c/Ly)
    i = int(np.argmin(abs(land.b - 0.5 * geom.lambda_c)))
    found = []
    for sign in (1.0, -1.0):
        j = int(np.argmin(abs(land.theta - sign * 1.43 * unit)))
        patch = land.delta_e[i - 1 : i + 2, j - 1 : j + 2]
        found.append(bool(land.delta_e[i, j] == patch.min() and land.delta_e[i, j] < 0))
    ok &= all(found)
    return ok, f"argmin (b, theta) = ({b0:.3e}, {t0:.3e}); secondary minima found: {found}; theta-even: exact"


def check_properties():
    L = 1 * UM
    ks = np.array([0.05, 0.3, 1.0, 2.6, 6.0, 15.0]) / L
    gs = [g_scattering(k, L, GOLD).value for k in ks]
    g0 = g_pfa(0.0, L, GOLD).value
    negative = all(g < 0 for g in gs) and g0 < 0
    ratios = [g / g0 for g in gs]
    decreasing = all(b < a for a, b in zip([1.0] + ratios, ratios))
    # PFA torque linear in k
    geom = reference_geometry()
    taus = [torque_max(geom.replace(lambda_c=2 * math.pi / k), GOLD, Method.PFA).torque_per_area / k for k in ks]
    linear = max(abs(t / taus[0] - 1) for t in taus) <= 1e-12
    # analytic vs finite-difference derivatives
    g = -1.0
    g_at = geom.replace(theta=0.4 * geom.lambda_c / geom.Ly, b=0.13 * geom.lambda_c)
    h_t = 1e-4 * g_at.theta
    num_t = -(energy_correction(g_at.replace(theta=g_at.theta + h_t), GOLD, g=g)
              - energy_correction(g_at.replace(theta=g_at.theta - h_t), GOLD, g=g)) / (2 * h_t)
    # restoring torque at theta > 0 equals dE/dtheta
    fd_t = abs(torque(g_at, GOLD, g=g) / -num_t - 1)
    h_b = 1e-4 * g_at.lambda_c
    num_b = -(energy_correction(g_at.replace(b=g_at.b + h_b), GOLD, g=g)
              - energy_correction(g_at.replace(b=g_at.b - h_b), GOLD, g=g)) / (2 * h_b)
    fd_b = abs(lateral_force(g_at, GOLD, g=g) / num_b - 1)
    tight = QuadratureSpec(rel_tol=1e-10, transform_scale=0.5)
    h = 1e-3 * L
    e = [lifshitz.energy_per_area(L + s * h, GOLD, tight) for s in (-1, 0, 1)]
    fd_1 = abs((e[2] - e[0]) / (2 * h) / lifshitz.energy_first_derivative(L, GOLD, tight) - 1)
    fd_2 = abs((e[2] - 2 * e[1] + e[0]) / h**2 / lifshitz.energy_second_derivative(L, GOLD, tight) - 1)
    derivs = fd_t <= 1e-6 and fd_b <= 1e-6 and fd_1 <= 1e-3 and fd_2 <= 1e-3
    ok = negative and decreasing and linear and derivs
    detail = (
        f"G<0: {negative}; G/G0 decreasing: {decreasing}; PFA linear: {linear}; "
        f"FD errors torque {fd_t:.1e}, force {fd_b:.1e}, e' {fd_1:.1e}, e'' {fd_2:.1e}"
    )
    return ok, detail


CHECKS: list[tuple[str, Callable]] = [
    ("headline-torque", check_headline_torque),
    ("optimal-wavenumber", check_optimal_wavenumber),
    ("pfa-error", check_pfa_error),
    ("conductivity-error", check_conductivity_error),
    ("proximity-theorem", check_proximity_theorem),
    ("sinc-constants", check_sinc_constants),
    ("lifshitz-oracle", check_lifshitz),
    ("landscape-geometry", check_landscape),
    ("properties", check_properties),
]


def run_checks(names=None, progress: Callable | None = None) -> list:
    results = []
    for name, fn in CHECKS:
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - t0)
        results.append(res)
        if progress is not None:
            progress(res)
    return results
