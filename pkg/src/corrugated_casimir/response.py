"""The corrugation response function G(k).

The crossed second-order correction to the Casimir energy of two plates
with profiles ``h1 = a1 cos(k x)`` and ``h2 = a2 cos(k (x - b))`` (both
counted positive towards the gap) is ``(a1 a2 / 2) G(k) cos(k b)`` per
unit area.  Expanding ``Tr ln(1 - M)`` to the crossed order gives

    G(k) = -hbar/(2 pi) int dxi int d^2p/(2 pi)^2 exp(-kappa_1 L - kappa_2 L)
           tr[ D(k_1) rho(k_1 <- k_2) D(k_2) S rho(k_2 <- k_1) S ]

with ``k_1,2 = p +- k x_hat/2``, ``D = (1 - r**2 exp(-2 kappa L))**-1``
the specular round-trip resummation, ``rho`` the first-order nonspecular
kernel of one plate and ``S = diag(1, -1)``.  The second plate is the
mirror image of the first under ``z -> L - z``; mirroring flips the
transverse magnetic field and hence the sign of TM amplitudes in our
basis.  The ``+k`` and ``-k`` diffraction orders contribute equally and
together produce the ``cos(k b)`` factor.

At ``k = 0`` the kernel reduces to ``2 kappa r`` and the integral becomes
``e''_PP(L)``: the proximity-force limit is exact.
"""
from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np

from . import lifshitz
from .mirrors import _nonspecular, _scaled_wp, _specular
from .model import C, HBAR, Material
from .quadrature import (
    IntegralResult,
    NonConvergenceError,
    QuadratureSpec,
    integrate_half_line,
    integrate_plane_polar,
)

DEFAULT_SPEC = QuadratureSpec(rel_tol=1e-5, transform_scale=0.5, azimuthal_order=16)


class Method(str, enum.Enum):
    SCATTERING = "scattering"
    PFA = "pfa"
    PERFECT_SCATTERING = "perfect"


@dataclass(frozen=True)
class ResponseSample:
    k: float
    L: float
    material: Material
    method: Method
    value: float
    error_estimate: float


def trace_integrand(q: float, xi, px, py, wp: float):
    """Scaled integrand of G at shift ``q`` (units of 1/L), including the exponentials."""
    k1x = px + 0.5 * q
    k2x = px - 0.5 * q
    k1 = np.hypot(k1x, py)
    k2 = np.hypot(k2x, py)
    kap1, te1, tm1 = _specular(k1, xi, wp)
    kap2, te2, tm2 = _specular(k2, xi, wp)
    e1 = np.exp(-2.0 * kap1)
    e2 = np.exp(-2.0 * kap2)
    d1e = 1.0 / (1.0 - te1 * te1 * e1)
    d1m = 1.0 / (1.0 - tm1 * tm1 * e1)
    d2e = 1.0 / (1.0 - te2 * te2 * e2)
    d2m = 1.0 / (1.0 - tm2 * tm2 * e2)
    # rho(k1 <- k2) and rho(k2 <- k1)
    a_ee, a_em, a_me, a_mm = _nonspecular(k1x, py, k2x, py, xi, wp)
    b_ee, b_em, b_me, b_mm = _nonspecular(k2x, py, k1x, py, xi, wp)
    tr = (
        d1e * d2e * a_ee * b_ee
        + d1m * d2m * a_mm * b_mm
        - d1e * d2m * a_em * b_me
        - d1m * d2e * a_me * b_em
    )
    return tr * np.exp(-kap1 - kap2)


def _centred_integrand(q: float, xi: float, wp: float):
    """Integrand over k_1 in polar coordinates centred on k_1 = 0.

    The trace has features of width ~xi around k_1 = 0 and k_2 = 0.  The
    partition of unity chi_1 = |k_2|**2/(|k_1|**2 + |k_2|**2) removes the
    k_2 = 0 feature, so only the polar origin is special; the chi_2 half is
    the image of the chi_1 half under p -> -p and gives the factor 2.
    """

    def f(r, phi):
        k1x = r * np.cos(phi)
        py = r * np.sin(phi)
        k2x = k1x - q
        n1 = k1x * k1x + py * py
        n2 = k2x * k2x + py * py
        weight = 2.0 * n2 / (n1 + n2)
        return weight * trace_integrand(q, xi, k1x - 0.5 * q, py, wp)

    return f


def _scattering_integral(q: float, wp: float, spec: QuadratureSpec) -> IntegralResult:
    inner_spec = spec.with_(rel_tol=0.25 * spec.rel_tol)
    worst = {"rel": 0.0, "ok": True, "evals": 0}
    radial_scale = max(spec.transform_scale, 0.5 * q)

    def outer(xis):
        out = np.empty_like(xis)
        for i, xi in enumerate(xis):
            res = integrate_plane_polar(_centred_integrand(q, xi, wp), inner_spec, scale=radial_scale)
            out[i] = res.value
            worst["evals"] += res.evaluations
            if res.value:
                worst["rel"] = max(worst["rel"], res.error_estimate / abs(res.value))
            worst["ok"] &= res.converged
        return out

    res = integrate_half_line(outer, spec.with_(rel_tol=0.75 * spec.rel_tol), scale=spec.transform_scale)
    err = res.error_estimate + worst["rel"] * abs(res.value)
    return IntegralResult(res.value, err, worst["evals"], res.converged and worst["ok"])


_cache: dict = {}
_cache_lock = threading.Lock()


def clear_cache():
    with _cache_lock:
        _cache.clear()


def _cached(key, compute):
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    value = compute()
    with _cache_lock:
        _cache.setdefault(key, value)
    return value


def _check_args(k, L):
    if not k >= 0:
        raise ValueError(f"corrugation wavenumber must be >= 0, got {k!r}")
    if not L > 0:
        raise ValueError(f"non-positive separation: {L!r}")


def g_pfa(k: float, L: float, material: Material, spec: QuadratureSpec | None = None) -> ResponseSample:
    """PFA response: e''_PP(L) for every k."""
    _check_args(k, L)

    def compute():
        # identical path to lifshitz.energy_second_derivative
        value, err = lifshitz._physical(2, L, material, None)
        return float(value), float(err)

    key = ("pfa", float(L), material)
    value, err = _cached(key, compute)
    return ResponseSample(k, L, material, Method.PFA, value, err)


def g_scattering(k: float, L: float, material: Material, spec: QuadratureSpec | None = None) -> ResponseSample:
    """Scattering-approach G(k) (J/m^4) for plates made of ``material``."""
    _check_args(k, L)
    method = Method.PERFECT_SCATTERING if material.is_perfect else Method.SCATTERING
    if k == 0.0:
        s = g_pfa(0.0, L, material, spec)
        return ResponseSample(0.0, L, material, method, s.value, s.error_estimate)
    spec = DEFAULT_SPEC if spec is None else spec

    def compute():
        res = _scattering_integral(k * L, _scaled_wp(material, L), spec)
        res.require(f"G(k={k!r}, L={L!r})")
        pref = -HBAR * C / (8.0 * math.pi**3 * L**5)
        return float(pref * res.value), float(abs(pref) * res.error_estimate)

    value, err = _cached(("scattering", float(k), float(L), material, spec), compute)
    return ResponseSample(k, L, material, method, value, err)


def g_value(
    k: float, L: float, material: Material, method: Method = Method.SCATTERING,
    spec: QuadratureSpec | None = None,
) -> ResponseSample:
    """Dispatch on ``method``; PERFECT_SCATTERING ignores ``material``."""
    method = Method(method)
    if method is Method.PFA:
        return g_pfa(k, L, material, spec)
    if method is Method.PERFECT_SCATTERING:
        return g_scattering(k, L, Material.perfect(), spec)
    return g_scattering(k, L, material, spec)


def g_ratio(k: float, L: float, material: Material, spec: QuadratureSpec | None = None) -> float:
    """G(k)/G(0): the beyond-PFA suppression factor."""
    if k == 0.0:
        return 1.0
    return g_scattering(k, L, material, spec).value / g_pfa(0.0, L, material, spec).value


__all__ = [
    "Method",
    "NonConvergenceError",
    "ResponseSample",
    "g_pfa",
    "g_ratio",
    "g_scattering",
    "g_value",
    "trace_integrand",
]
