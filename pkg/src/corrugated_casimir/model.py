"""Physical constants, input parameter types and the sinc profile.

All lengths are SI metres, angles are radians.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants as _sc
from scipy.optimize import brentq

# below this |x| the sinc series is used; truncation error < 1e-20 there
SINC_SERIES_SWITCH = 1e-4

DEFAULT_VALIDITY_FRACTION = 0.1
DEFAULT_SCALE_SEPARATION = 10.0


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    c: float = _sc.c


CONSTANTS = PhysicalConstants()
HBAR = CONSTANTS.hbar
C = CONSTANTS.c


class MaterialKind(str, enum.Enum):
    PERFECT = "perfect"
    PLASMA = "plasma"


@dataclass(frozen=True)
class Material:
    """Mirror model: perfect reflector or plasma model with wavelength `lambda_p`."""

    kind: MaterialKind
    lambda_p: Optional[float] = None

    def __post_init__(self):
        kind = MaterialKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MaterialKind.PLASMA:
            if self.lambda_p is None or not self.lambda_p > 0:
                raise ValueError("plasma model needs a positive plasma wavelength")
        elif self.lambda_p is not None:
            raise ValueError("lambda_p meaningless for perfect mirrors")

    @classmethod
    def perfect(cls) -> "Material":
        return cls(MaterialKind.PERFECT)

    @classmethod
    def plasma(cls, lambda_p: float) -> "Material":
        return cls(MaterialKind.PLASMA, float(lambda_p))

    @property
    def is_perfect(self) -> bool:
        return self.kind is MaterialKind.PERFECT

    @property
    def omega_p(self) -> float:
        """Plasma angular frequency 2 pi c / lambda_p (rad/s); inf for perfect mirrors."""
        if self.is_perfect:
            return math.inf
        return 2.0 * math.pi * C / self.lambda_p

    def label(self) -> str:
        if self.is_perfect:
            return "perfect"
        return f"plasma(lambda_p={self.lambda_p!r})"


@dataclass(frozen=True)
class Geometry:
    """Two corrugated plates.

    L is the mean separation, Lx, Ly the lateral sizes of the top plate
    (corrugation lines of the bottom plate run along y), a1, a2 the
    corrugation amplitudes, lambda_c the common period, b the lateral
    offset along x and theta the rotation angle of the top plate.
    """

    L: float
    Lx: float
    Ly: float
    a1: float
    a2: float
    lambda_c: float
    b: float = 0.0
    theta: float = 0.0
    # exact a1*a2 when only the product is known
    amplitude_product: Optional[float] = None

    @classmethod
    def from_product(cls, L, Lx, Ly, a1a2, lambda_c, b=0.0, theta=0.0) -> "Geometry":
        """Build a geometry from the amplitude product only (a1 = a2 = sqrt(a1a2))."""
        a = math.sqrt(a1a2)
        return cls(L=L, Lx=Lx, Ly=Ly, a1=a, a2=a, lambda_c=lambda_c, b=b, theta=theta,
                   amplitude_product=float(a1a2))

    @property
    def k(self) -> float:
        return corrugation_wavenumber(self.lambda_c)

    @property
    def a1a2(self) -> float:
        if self.amplitude_product is not None:
            return self.amplitude_product
        return self.a1 * self.a2

    def replace(self, **changes) -> "Geometry":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_for_errors(self):
        if self.errors:
            raise ValueError("; ".join(self.errors))


def validate(
    geometry: Geometry,
    material: Material,
    validity_fraction: float = DEFAULT_VALIDITY_FRACTION,
    scale_separation: float = DEFAULT_SCALE_SEPARATION,
) -> ValidationReport:
    """Check hard invariants (errors) and perturbative-regime assumptions (warnings).

    The amplitudes must stay below ``validity_fraction * min(L, lambda_c)``
    and the plate sizes above ``scale_separation * lambda_c``; breaches are
    reported as warnings carrying the offending ratio.
    """
    report = ValidationReport()
    g = geometry
    for name, value, label in (
        ("L", g.L, "separation"),
        ("Lx", g.Lx, "plate size Lx"),
        ("Ly", g.Ly, "plate size Ly"),
        ("lambda_c", g.lambda_c, "corrugation period"),
    ):
        if not (np.isfinite(value) and value > 0):
            report.errors.append(f"non-positive {label} ({name}={value!r})")
    for name, value in (("a1", g.a1), ("a2", g.a2)):
        if not (np.isfinite(value) and value >= 0):
            report.errors.append(f"negative corrugation amplitude ({name}={value!r})")
    for name, value in (("b", g.b), ("theta", g.theta)):
        if not np.isfinite(value):
            report.errors.append(f"non-finite {name}")
    if material.kind is MaterialKind.PLASMA and not (material.lambda_p and material.lambda_p > 0):
        report.errors.append("non-positive plasma wavelength")
    if report.errors:
        return report

    scale = min(g.L, g.lambda_c)
    for name, value in (("a1", g.a1), ("a2", g.a2)):
        ratio = value / scale
        if ratio > validity_fraction:
            report.warnings.append(
                f"{name}/min(L, lambda_c) = {ratio:.3g} exceeds {validity_fraction:g}; "
                "second-order perturbation theory may be inaccurate"
            )
    for name, value in (("Lx", g.Lx), ("Ly", g.Ly)):
        ratio = value / g.lambda_c
        if ratio < scale_separation:
            report.warnings.append(
                f"{name}/lambda_c = {ratio:.3g} below {scale_separation:g}; border effects not negligible"
            )
    return report


def corrugation_wavenumber(lambda_c: float) -> float:
    """k = 2 pi / lambda_c."""
    if not lambda_c > 0:
        raise ValueError(f"non-positive corrugation period: {lambda_c!r}")
    return 2.0 * math.pi / lambda_c


def sinc(x):
    """sin(x)/x, with the removable singularity handled by its Taylor series."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < SINC_SERIES_SWITCH
    xs = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(xs) / xs)
    return out[()] if out.ndim == 0 else out


def sinc_derivative(x):
    """d/dx sinc(x) = (x cos x - sin x)/x**2."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    small = ax < SINC_SERIES_SWITCH
    xs = np.where(small, 1.0, ax)
    direct = (xs * np.cos(xs) - np.sin(xs)) / (xs * xs)
    series = -ax / 3.0 + ax**3 / 30.0
    out = np.sign(x) * np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


def sinc_first_minimum() -> float:
    """Location of the first (global) minimum of sinc, the root of tan x = x on (pi, 3pi/2)."""
    return brentq(lambda x: float(sinc_derivative(x)), math.pi + 1e-9, 1.5 * math.pi - 1e-9, xtol=1e-15)


def golden_section_max(f, lo: float, hi: float, xtol: float, max_iter: int = 200):
    """Maximize a unimodal ``f`` on [lo, hi] to within ``xtol``; returns (x_max, f(x_max))."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    if fc > fd:
        return c, fc
    return d, fd
