"""Adaptive quadrature on [0, inf) and on the plane in polar coordinates.

The half line is mapped onto [0, 1) by ``u = x/(x + scale)`` and integrated
with a globally adaptive 7/15-point Gauss-Kronrod rule.  Integrands are
vectorized: they receive a numpy array of abscissae and return an array of
the same shape.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 Kronrod nodes on [-1, 1]; the Gauss subset sits at the odd positions
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class EvaluationFailure(ArithmeticError):
    """The integrand returned NaN or Inf."""

    def __init__(self, abscissa, value):
        self.abscissa = abscissa
        self.value = value
        super().__init__(f"integrand not finite at x={abscissa!r} (value {value!r})")


class NonConvergenceError(RuntimeError):
    """A caller promoted a non-converged IntegralResult to an error."""

    def __init__(self, message, result=None):
        self.result = result
        super().__init__(message)


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-6
    abs_tol: float = 0.0
    max_subdivisions: int = 2000
    transform_scale: float = 1.0
    azimuthal_order: int = 16
    max_azimuthal_order: int = 1024

    def __post_init__(self):
        if not (self.rel_tol > 0 or self.abs_tol > 0):
            raise ValueError("need rel_tol > 0 or abs_tol > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.transform_scale > 0:
            raise ValueError("transform_scale must be positive")
        if self.azimuthal_order < 2:
            raise ValueError("azimuthal_order must be >= 2")

    def with_(self, **changes) -> "QuadratureSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def tolerance(self, spec: QuadratureSpec) -> float:
        return max(spec.rel_tol * abs(self.value), spec.abs_tol)

    def require(self, what: str = "integral") -> "IntegralResult":
        """Return self, or raise NonConvergenceError if the budget ran out."""
        if not self.converged:
            raise NonConvergenceError(
                f"{what} did not converge: value={self.value!r}, "
                f"error estimate={self.error_estimate!r}, evaluations={self.evaluations}",
                self,
            )
        return self


def _check_finite(x, y):
    bad = ~np.isfinite(y)
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise EvaluationFailure(np.ravel(x)[i], np.ravel(y)[i])


def _panel(f, a, b, scale):
    """Gauss-Kronrod estimate on the u-panel [a, b] of the mapped integrand."""
    half = 0.5 * (b - a)
    u = 0.5 * (a + b) + half * _NODES
    one_minus = 1.0 - u
    x = scale * u / one_minus
    jac = scale / (one_minus * one_minus)
    y = np.asarray(f(x), dtype=float)
    _check_finite(x, y)
    g = y * jac
    kronrod = half * float(g @ _WK)
    gauss = half * float(g @ _WG15)
    return kronrod, abs(kronrod - gauss)


def integrate_half_line(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
    scale: float | None = None,
    initial_panels: int = 4,
) -> IntegralResult:
    """Integrate ``f`` over [0, inf).

    ``scale`` overrides ``spec.transform_scale`` and should be the natural
    decay length of the integrand.  Panels with the largest error are
    bisected until the summed Kronrod-Gauss error meets the tolerance or
    ``spec.max_subdivisions`` panels exist.
    """
    scale = spec.transform_scale if scale is None else scale
    n0 = max(1, min(initial_panels, spec.max_subdivisions))
    edges = np.linspace(0.0, 1.0, n0 + 1)
    heap = []
    total = 0.0
    err = 0.0
    evals = 0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = _panel(f, a, b, scale)
        evals += 15
        total += val
        err += e
        heapq.heappush(heap, (-e, a, b, val))
    n_panels = n0
    while err > max(spec.rel_tol * abs(total), spec.abs_tol):
        if n_panels >= spec.max_subdivisions:
            return IntegralResult(total, err, evals, False)
        neg_e, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        v1, e1 = _panel(f, a, mid, scale)
        v2, e2 = _panel(f, mid, b, scale)
        evals += 30
        total += v1 + v2 - val
        err += e1 + e2 + neg_e
        # re-sum occasionally to keep the running totals free of drift
        if n_panels % 64 == 0:
            total = sum(p[3] for p in heap) + v1 + v2
            err = sum(-p[0] for p in heap) + e1 + e2
        heapq.heappush(heap, (-e1, a, mid, v1))
        heapq.heappush(heap, (-e2, mid, b, v2))
        n_panels += 1
    err = max(err, 0.0)
    return IntegralResult(total, err, evals, True)


def azimuthal_nodes(order: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(order) / order


def integrate_plane_polar(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
    scale: float | None = None,
    fixed_order: int | None = None,
) -> IntegralResult:
    """Integrate ``f(r, phi)`` over the plane, Jacobian ``r`` included.

    The radial half-line rule is combined with a periodic trapezoidal rule
    in azimuth.  For every batch of radial nodes the azimuthal order is
    doubled (starting at ``spec.azimuthal_order``) until two successive
    orders agree to ``rel_tol/10`` of the batch magnitude.  Pass
    ``fixed_order`` to disable the azimuthal adaptivity.
    """
    state = {"evals": 0, "az_err": 0.0, "az_ok": True}
    target = 0.1 * spec.rel_tol

    def radial(r):
        r = np.asarray(r, dtype=float)
        order = fixed_order or spec.azimuthal_order
        phi = azimuthal_nodes(order)
        vals = f(r[:, None], phi[None, :])
        _check_finite(r[:, None] + 0 * phi[None, :], vals)
        state["evals"] += vals.size
        mean = vals.mean(axis=1)
        if fixed_order:
            return r * 2.0 * math.pi * mean
        while True:
            if order >= spec.max_azimuthal_order:
                state["az_ok"] = False
                break
            # odd nodes of the doubled rule
            phi_new = phi + math.pi / order
            extra = f(r[:, None], phi_new[None, :])
            _check_finite(r[:, None] + 0 * phi_new[None, :], extra)
            state["evals"] += extra.size
            new_mean = 0.5 * (mean + extra.mean(axis=1))
            order *= 2
            phi = np.sort(np.concatenate([phi, phi_new]))
            diff = np.max(np.abs(new_mean - mean) * r)
            size = np.max(np.abs(new_mean) * r)
            mean = new_mean
            if diff <= target * size + spec.abs_tol or size == 0.0:
                state["az_err"] = max(state["az_err"], diff / size if size else 0.0)
                break
        return r * 2.0 * math.pi * mean

    # leave a tenth of the budget to the azimuthal rule
    radial_spec = spec.with_(rel_tol=0.9 * spec.rel_tol, abs_tol=0.9 * spec.abs_tol)
    res = integrate_half_line(radial, radial_spec, scale=scale)
    error = res.error_estimate + state["az_err"] * abs(res.value)
    converged = res.converged and state["az_ok"]
    return IntegralResult(res.value, error, state["evals"], converged)
