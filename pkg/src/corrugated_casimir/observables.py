"""Energy landscape, torque, lateral force and optimal corrugation.

Per unit area the crossed energy correction is

    dE/(Lx Ly) = (a1 a2 / 2) G(k) cos(k b) sinc(k Ly theta / 2).

Torques are reported in the restoring convention: positive values drive
the plate back towards theta = 0.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .model import Geometry, Material, golden_section_max, sinc, sinc_derivative, sinc_first_minimum
from .quadrature import QuadratureSpec
from .response import Method, g_value


class Stability(str, enum.Enum):
    RESTORED_WITHOUT_SLIDING = "restored_without_sliding"
    ROTATES_AND_SLIDES = "rotates_and_slides"


@dataclass(frozen=True)
class LandscapePoint:
    b: float
    theta: float
    delta_e_per_area: float


@dataclass(frozen=True)
class TorqueResult:
    torque_per_area: float
    theta_at: float
    method: Method
    sign_convention: str = "positive = restoring toward theta = 0"


@dataclass(frozen=True)
class Landscape:
    b: np.ndarray
    theta: np.ndarray
    delta_e: np.ndarray  # shape (len(b), len(theta))

    def points(self) -> Iterator[LandscapePoint]:
        for i, b in enumerate(self.b):
            for j, t in enumerate(self.theta):
                yield LandscapePoint(float(b), float(t), float(self.delta_e[i, j]))

    def argmin(self):
        i, j = np.unravel_index(np.argmin(self.delta_e), self.delta_e.shape)
        return float(self.b[i]), float(self.theta[j])


def _g(geometry: Geometry, material: Material, method, spec, g: Optional[float]) -> float:
    if g is not None:
        return g
    return g_value(geometry.k, geometry.L, material, method, spec).value


def energy_correction(
    geometry: Geometry, material: Material, method=Method.SCATTERING,
    spec: QuadratureSpec | None = None, g: float | None = None,
) -> float:
    """Crossed energy correction per unit area (J/m^2).

    ``g`` short-circuits the response evaluation when G(k) is already known.
    """
    G = _g(geometry, material, method, spec, g)
    k = geometry.k
    return 0.5 * geometry.a1a2 * G * math.cos(k * geometry.b) * float(sinc(0.5 * k * geometry.Ly * geometry.theta))


def torque(
    geometry: Geometry, material: Material, method=Method.SCATTERING,
    spec: QuadratureSpec | None = None, g: float | None = None,
) -> float:
    """Restoring torque per unit area (N/m) at the geometry's (b, theta)."""
    G = _g(geometry, material, method, spec, g)
    k = geometry.k
    half = 0.5 * k * geometry.Ly
    # tau = -dE/dtheta; restoring component = -sign(theta) tau = sign(theta) dE/dtheta
    de_dtheta = 0.5 * geometry.a1a2 * G * math.cos(k * geometry.b) * half * float(sinc_derivative(half * geometry.theta))
    return math.copysign(1.0, geometry.theta) * de_dtheta if geometry.theta != 0 else 0.0


def lateral_force(
    geometry: Geometry, material: Material, method=Method.SCATTERING,
    spec: QuadratureSpec | None = None, g: float | None = None,
) -> float:
    """Lateral force per unit area along x (N/m^2), -d/db of the energy correction."""
    G = _g(geometry, material, method, spec, g)
    k = geometry.k
    return 0.5 * geometry.a1a2 * G * k * math.sin(k * geometry.b) * float(sinc(0.5 * k * geometry.Ly * geometry.theta))


def torque_max(
    geometry: Geometry, material: Material, method=Method.SCATTERING,
    spec: QuadratureSpec | None = None, g: float | None = None, rel_tol: float = 1e-6,
) -> TorqueResult:
    """Maximum restoring torque along b = 0 and the angle where it is reached.

    Golden-section search on theta in [0.3, 1.0] lambda_c/Ly.
    """
    method = Method(method)
    G = _g(geometry, material, method, spec, g)
    if G == 0.0:
        return TorqueResult(0.0, float("nan"), method)
    base = geometry.replace(b=0.0)
    unit = geometry.lambda_c / geometry.Ly
    lo, hi = 0.3 * unit, 1.0 * unit

    def f(theta):
        return torque(base.replace(theta=theta), material, method, g=G)

    theta_star, tau = golden_section_max(f, lo, hi, xtol=rel_tol * hi)
    edge = 1e-3 * (hi - lo)
    if theta_star - lo < edge or hi - theta_star < edge:
        raise RuntimeError(f"no interior torque maximum in [{lo!r}, {hi!r}] (found theta={theta_star!r})")
    return TorqueResult(float(tau), float(theta_star), method)


def torque_pfa_max(geometry: Geometry, material: Material, spec: QuadratureSpec | None = None) -> TorqueResult:
    return torque_max(geometry, material, Method.PFA, spec)


def stability_classify(geometry: Geometry, material: Material | None = None) -> Stability:
    """Release from (b = 0, theta): restored in place iff |theta| < lambda_c/Ly.

    Below that angle the sinc factor stays positive, so b = 0 remains a
    lateral energy minimum.  The boundary itself (zero lateral curvature)
    counts as sliding.
    """
    if abs(geometry.theta) < geometry.lambda_c / geometry.Ly:
        return Stability.RESTORED_WITHOUT_SLIDING
    return Stability.ROTATES_AND_SLIDES


class BracketError(RuntimeError):
    def __init__(self, message, profile):
        self.profile = profile
        super().__init__(message)


def optimal_wavenumber(
    L: float, material: Material, method=Method.SCATTERING, spec: QuadratureSpec | None = None,
    bracket=(0.2, 20.0), samples: int = 9, rel_tol: float = 1e-3,
) -> float:
    """Corrugation wavenumber maximizing k |G(k)| (hence the torque) at separation L.

    A coarse log-spaced scan over ``bracket``/L locates the peak, then a
    golden-section search on log k refines it.
    """
    method = Method(method)
    if method is Method.PFA:
        raise ValueError("the PFA torque grows linearly with k; it has no optimal wavenumber")

    def score(logk):
        k = math.exp(logk)
        return k * abs(g_value(k, L, material, method, spec).value)

    grid = np.linspace(math.log(bracket[0] / L), math.log(bracket[1] / L), samples)
    values = [score(x) for x in grid]
    i = int(np.argmax(values))
    if i == 0 or i == samples - 1:
        profile = [(math.exp(x), v) for x, v in zip(grid, values)]
        raise BracketError(f"k|G(k)| peaks at the bracket edge (k={math.exp(grid[i])!r})", profile)
    logk, _ = golden_section_max(score, grid[i - 1], grid[i + 1], xtol=rel_tol)
    return math.exp(logk)


def _symmetric_grid(extent: float, steps: int) -> np.ndarray:
    """`steps` points on [-extent, extent], exactly antisymmetric."""
    t = np.linspace(-extent, extent, steps)
    return 0.5 * (t - t[::-1])


def landscape_grid(
    geometry: Geometry, material: Material, method=Method.SCATTERING,
    b_steps: int = 65, theta_steps: int = 65, spec: QuadratureSpec | None = None,
    g: float | None = None,
) -> Landscape:
    """Energy correction on b in [0, 2 lambda_c] and theta within twice the sinc-minimum angle."""
    if b_steps < 8 or theta_steps < 8:
        raise ValueError("landscape grid needs at least 8 steps per axis")
    G = _g(geometry, material, method, spec, g)
    k = geometry.k
    theta_ext = 2.0 * 2.0 * sinc_first_minimum() / (k * geometry.Ly)
    b = np.linspace(0.0, 2.0 * geometry.lambda_c, b_steps)
    theta = _symmetric_grid(theta_ext, theta_steps)
    values = 0.5 * geometry.a1a2 * G * np.cos(k * b)[:, None] * sinc(0.5 * k * geometry.Ly * theta)[None, :]
    return Landscape(b, theta, values)


@dataclass(frozen=True)
class SweepRow:
    k: float
    tau_scattering: float
    tau_pfa: float
    tau_perfect: float
    theta_star: float
    error: str = ""


def _sweep_row(args) -> SweepRow:
    k, L, material, a1a2, Ly, spec = args
    geom = Geometry.from_product(L=L, Lx=Ly, Ly=Ly, a1a2=a1a2, lambda_c=2.0 * math.pi / k)
    try:
        sc = torque_max(geom, material, Method.SCATTERING, spec)
        pfa = torque_max(geom, material, Method.PFA, spec)
        perfect = torque_max(geom, material, Method.PERFECT_SCATTERING, spec)
    except Exception as exc:  # row-level capture; the sweep continues
        nan = float("nan")
        return SweepRow(k, nan, nan, nan, nan, f"{type(exc).__name__}: {exc}")
    return SweepRow(k, sc.torque_per_area, pfa.torque_per_area, perfect.torque_per_area, sc.theta_at)


def sweep_k(
    L: float, material: Material, k_grid: Sequence[float], a1a2: float, Ly: float,
    spec: QuadratureSpec | None = None, workers: int = 1,
) -> list:
    """Maximum torque versus k for scattering, PFA and perfect mirrors.

    Rows come back in input order whatever the worker count.
    """
    ks = [float(k) for k in k_grid]
    if not ks or any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_grid must be positive and strictly increasing")
    jobs = [(k, L, material, a1a2, Ly, spec) for k in ks]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, jobs))
    return [_sweep_row(job) for job in jobs]
