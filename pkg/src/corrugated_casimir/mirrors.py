"""Reflection of imaginary-frequency waves by a single metallic plate.

Conventions
-----------
The plate fills the half space below its surface; waves arrive from the
vacuum side.  Reflection matrices are indexed ``[out, in]`` over the
polarization pair ``(TE, TM)``.  A TE amplitude is the transverse electric
field along ``z x k_hat``, a TM amplitude is the transverse magnetic field
along the same direction.  With this choice a perfect mirror reflects with
``diag(-1, +1)``.

The nonspecular kernel is the first-order (in the surface profile) change
of the reflection operator of a surface ``z = h(x, y)``, obtained by
linearizing the Maxwell boundary conditions around the flat interface.  It
is returned per unit Fourier amplitude of ``h`` at ``k_out - k_in``, with
``h`` counted positive towards the vacuum.  A uniform shift (``k_out ==
k_in``) gives ``2 kappa diag(r_TE, r_TM)``, the derivative of the specular
reflection referenced to the fixed plane.

Scaled helpers (``_specular``, ``_nonspecular``) work with lengths in units
of a reference length ``L`` and frequencies in units of ``c/L``; plasma
models enter through ``wp = omega_p L / c`` (``np.inf`` for a perfect
mirror).  They are vectorized over numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import C, Material

TE, TM = 0, 1


@dataclass(frozen=True)
class EvaluationPoint:
    """Imaginary frequency xi (rad/s) and transverse wavevector (rad/m)."""

    xi: float
    kvec: tuple

    def __post_init__(self):
        kv = tuple(float(v) for v in self.kvec)
        if len(kv) != 2:
            raise ValueError("kvec must be a transverse 2-vector")
        object.__setattr__(self, "kvec", kv)
        if not self.xi > 0:
            raise ValueError(f"imaginary frequency must be positive, got {self.xi!r}")
        if not all(math.isfinite(v) for v in kv):
            raise ValueError("kvec must be finite")

    @property
    def k(self) -> float:
        return math.hypot(*self.kvec)


@dataclass(frozen=True)
class ReflectionMatrix:
    """2x2 reflection matrix, rows = outgoing (TE, TM), columns = incoming."""

    entries: np.ndarray

    def __getitem__(self, item):
        return self.entries[item]

    @property
    def is_diagonal(self) -> bool:
        return self.entries[0, 1] == 0.0 and self.entries[1, 0] == 0.0


def plasma_frequency(material: Material) -> float:
    return material.omega_p


def epsilon_plasma(xi: float, material: Material) -> float:
    """Plasma-model permittivity at imaginary frequency: 1 + omega_p**2/xi**2."""
    if material.is_perfect:
        raise ValueError("a perfect mirror has no dielectric function")
    if not xi > 0:
        raise ValueError(f"imaginary frequency must be positive, got {xi!r}")
    return 1.0 + (material.omega_p / xi) ** 2


def kappa(point: EvaluationPoint, epsilon: float = 1.0) -> float:
    """Axial wavevector sqrt(|k|**2 + epsilon xi**2/c**2) (rad/m)."""
    return math.sqrt(point.k**2 + epsilon * (point.xi / C) ** 2)


def _scaled_wp(material: Material, length: float) -> float:
    if material.is_perfect:
        return math.inf
    return material.omega_p * length / C


def _specular(k, xi, wp):
    """(kappa, r_TE, r_TM) in scaled variables; wp = inf for a perfect mirror."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    kap = np.sqrt(k * k + xi * xi)
    if np.isinf(wp):
        shape = np.broadcast(k, xi).shape
        return kap, np.full(shape, -1.0), np.full(shape, 1.0)
    w2 = xi * xi + wp * wp  # epsilon xi**2
    kt = np.sqrt(k * k + w2)
    r_te = (kap - kt) / (kap + kt)
    r_tm = (w2 * kap - xi * xi * kt) / (w2 * kap + xi * xi * kt)
    return kap, r_te, r_tm


def _angles(k_out_x, k_out_y, k_in_x, k_in_y):
    """cos and sin of (phi_out - phi_in); (1, 0) where a wavevector vanishes."""
    n_out = np.hypot(k_out_x, k_out_y)
    n_in = np.hypot(k_in_x, k_in_y)
    norm = n_out * n_in
    safe = np.where(norm > 0, norm, 1.0)
    cos = np.where(norm > 0, (k_out_x * k_in_x + k_out_y * k_in_y) / safe, 1.0)
    sin = np.where(norm > 0, (k_in_x * k_out_y - k_in_y * k_out_x) / safe, 0.0)
    return n_out, n_in, cos, sin


def _nonspecular(k_out_x, k_out_y, k_in_x, k_in_y, xi, wp):
    """First-order kernel entries (EE, EM, ME, MM) in scaled variables.

    First letter = outgoing polarization, second = incoming (E = TE, M = TM).
    """
    ko, ki, cos, sin = _angles(k_out_x, k_out_y, k_in_x, k_in_y)
    xi = np.asarray(xi, dtype=float)
    xi2 = xi * xi
    kap_o = np.sqrt(ko * ko + xi2)
    kap_i = np.sqrt(ki * ki + xi2)
    if np.isinf(wp):
        ee = -2.0 * kap_i * cos
        em = -2.0 * xi * sin
        me = -2.0 * xi * kap_i * sin / kap_o
        mm = 2.0 * (xi2 * cos + ko * ki) / kap_o
        return ee, em, me, mm
    wp2 = wp * wp
    w2 = xi2 + wp2
    kt_o = np.sqrt(ko * ko + w2)
    kt_i = np.sqrt(ki * ki + w2)
    te_o = kap_o + kt_o
    te_i = kap_i + kt_i
    tm_o = w2 * kap_o + xi2 * kt_o
    tm_i = w2 * kap_i + xi2 * kt_i
    pre = 2.0 * kap_i * wp2
    ee = -pre * cos / (te_o * te_i)
    em = -pre * xi * kt_i * sin / (tm_i * te_o)
    me = -pre * xi * kt_o * sin / (te_i * tm_o)
    mm = pre * (xi2 * kt_o * kt_i * cos + w2 * ko * ki) / (tm_o * tm_i)
    return ee, em, me, mm


def specular_reflection(point: EvaluationPoint, material: Material) -> ReflectionMatrix:
    """Fresnel amplitudes diag(r_TE, r_TM) of a flat plate."""
    length = 1.0 / point.k if point.k > 0 else C / point.xi
    _, r_te, r_tm = _specular(point.k * length, point.xi * length / C, _scaled_wp(material, length))
    return ReflectionMatrix(np.diag([float(r_te), float(r_tm)]))


def nonspecular_first_order(
    in_point: EvaluationPoint,
    out_kvec,
    corrugation_k: float,
    material: Material,
    axis=(1.0, 0.0),
    rtol: float = 1e-9,
) -> ReflectionMatrix:
    """First-order nonspecular reflection kernel (rad/m) per unit corrugation amplitude.

    ``out_kvec - in_point.kvec`` must equal ``+-corrugation_k`` times the
    unit corrugation ``axis`` (first diffraction order of a sinusoid).
    """
    kin = np.asarray(in_point.kvec, dtype=float)
    kout = np.asarray(out_kvec, dtype=float)
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    q = kout - kin
    scale_ref = max(abs(corrugation_k), np.linalg.norm(kin), np.linalg.norm(kout), 1e-300)
    ok = any(np.linalg.norm(q - s * corrugation_k * ax) <= rtol * scale_ref for s in (1.0, -1.0))
    if not ok:
        raise ValueError(
            f"wavevector mismatch: out - in = {q.tolist()} is not +-{corrugation_k!r} along {ax.tolist()}"
        )
    length = C / in_point.xi
    ee, em, me, mm = _nonspecular(
        kout[0] * length, kout[1] * length, kin[0] * length, kin[1] * length, 1.0,
        _scaled_wp(material, length),
    )
    return ReflectionMatrix(np.array([[float(ee), float(em)], [float(me), float(mm)]]) / length)
