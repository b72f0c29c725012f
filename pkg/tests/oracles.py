"""Independent reference implementations used only by the tests.

``bc_kernel`` solves the linearized Maxwell boundary conditions of a
corrugated half space numerically (4x4 linear systems per incident
polarization) instead of using closed-form matrix elements.  Units: c = 1,
plane waves ``exp(i k.x + s z)``, vacuum above ``z = 0``; ``s = +kappa`` is
the incident wave, ``s = -kappa`` the reflected one.
"""
import numpy as np


def fields(k, s, Et, xi):
    """(E, H) of a plane wave with transverse electric field ``Et``."""
    kx, ky = k
    Ez = -1j * (kx * Et[0] + ky * Et[1]) / s
    E = np.array([Et[0], Et[1], Ez], dtype=complex)
    nabla = np.array([1j * kx, 1j * ky, s], dtype=complex)
    H = -np.cross(nabla, E) / xi
    return E, H


def _kappas(k, xi, eps):
    kk = np.hypot(*k)
    return np.sqrt(kk**2 + xi**2), np.sqrt(kk**2 + eps * xi**2)


def _solve(k, xi, eps, rhs_e, rhs_h, perfect):
    """Reflected (and transmitted) transverse E for given interface jumps."""
    kap, kt = _kappas(k, xi, eps)
    cols = []
    for j in range(2):
        e = np.eye(2)[j]
        E, H = fields(k, -kap, e, xi)
        cols.append(np.r_[E[:2], H[:2]])
    if perfect:
        return np.linalg.solve(np.array(cols).T[:2, :2], rhs_e), None
    for j in range(2):
        e = np.eye(2)[j]
        E, H = fields(k, kt, e, xi)
        cols.append(-np.r_[E[:2], H[:2]])
    sol = np.linalg.solve(np.array(cols).T, np.r_[rhs_e, rhs_h])
    return sol[:2], sol[2:]


def _zeroth(k, xi, eps, e_in, perfect):
    kap, kt = _kappas(k, xi, eps)
    Ei, Hi = fields(k, kap, e_in, xi)
    er, et = _solve(k, xi, eps, -Ei[:2], -Hi[:2], perfect)
    Er, Hr = fields(k, -kap, er, xi)
    vac = [(Ei, Hi, kap), (Er, Hr, -kap)]
    med = [] if perfect else [fields(k, kt, et, xi) + (kt,)]
    return er, vac, med


def flat_cartesian(k, xi, eps=1.0, perfect=False):
    """Specular reflection matrix in the Cartesian transverse-E basis."""
    M = np.zeros((2, 2), complex)
    for j in range(2):
        M[:, j] = _zeroth(np.asarray(k, float), xi, eps, np.eye(2)[j], perfect)[0]
    return M.real


def kernel_cartesian(kout, kin, xi, eps=1.0, perfect=False):
    """First-order nonspecular kernel (Cartesian transverse-E basis), per unit
    Fourier amplitude of a surface displacement toward the vacuum."""
    kout = np.asarray(kout, float)
    kin = np.asarray(kin, float)
    q = kout - kin
    M = np.zeros((2, 2), complex)
    zero = np.zeros(3)
    for j in range(2):
        _, vac, med = _zeroth(kin, xi, eps, np.eye(2)[j], perfect)
        dE = sum(E for E, H, s in vac) - sum((E for E, H, s in med), zero)
        dzE = sum(s * E for E, H, s in vac) - sum((s * E for E, H, s in med), zero)
        dzH = sum(s * H for E, H, s in vac) - sum((s * H for E, H, s in med), zero)
        # first-order jumps from Taylor-expanding the fields onto z = h
        rhs_e = -(dzE[:2] + 1j * q * dE[2])
        rhs_h = -dzH[:2]
        M[:, j] = _solve(kout, xi, eps, rhs_e, rhs_h, perfect)[0]
    return M.real


def _to_polarization(k, s, xi):
    """Columns: Cartesian transverse E of unit TE (E_phi) and unit TM (H_phi) amplitudes."""
    kk = np.hypot(*k)
    khat = np.asarray(k, float) / kk
    phihat = np.array([-khat[1], khat[0]])
    return np.column_stack([phihat, -(s / xi) * khat])


def kernel_polarization(kout, kin, xi, eps=1.0, perfect=False):
    """``kernel_cartesian`` expressed in the (TE, TM) amplitude basis."""
    kap_i = np.sqrt(np.dot(kin, kin) + xi**2)
    kap_o = np.sqrt(np.dot(kout, kout) + xi**2)
    T_in = _to_polarization(kin, kap_i, xi)
    T_out = _to_polarization(kout, -kap_o, xi)
    return np.linalg.solve(T_out, kernel_cartesian(kout, kin, xi, eps, perfect) @ T_in)


def trace_cartesian(q, xi, p, eps=1.0, perfect=False):
    """Crossed-order trace in the Cartesian transverse-E basis.

    Mirroring z -> L - z leaves transverse E unchanged, so both plates share
    the same Cartesian matrices and no sign bookkeeping is needed.
    """
    p = np.asarray(p, float)
    k1 = p + np.array([0.5 * q, 0.0])
    k2 = p - np.array([0.5 * q, 0.0])
    a1 = np.sqrt(k1 @ k1 + xi**2)
    a2 = np.sqrt(k2 @ k2 + xi**2)
    R1 = flat_cartesian(k1, xi, eps, perfect)
    R2 = flat_cartesian(k2, xi, eps, perfect)
    D1 = np.linalg.inv(np.eye(2) - R1 @ R1 * np.exp(-2 * a1))
    D2 = np.linalg.inv(np.eye(2) - R2 @ R2 * np.exp(-2 * a2))
    r12 = kernel_cartesian(k1, k2, xi, eps, perfect)
    r21 = kernel_cartesian(k2, k1, xi, eps, perfect)
    return np.trace(D1 @ r12 @ D2 @ r21) * np.exp(-a1 - a2)


def gauss_legendre_half_line(n, scale):
    """Fixed n-point Gauss-Legendre rule on [0, inf) via t = scale u/(1-u)."""
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    w = 0.5 * w
    return scale * u / (1.0 - u), w * scale / (1.0 - u) ** 2


def riemann_plane(f, r_max, n_r, n_phi):
    """Midpoint-rule integral of f(r, phi) r dr dphi over a disc of radius r_max."""
    r = (np.arange(n_r) + 0.5) * r_max / n_r
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    vals = f(r[:, None], phi[None, :]) * r[:, None]
    return vals.sum() * (r_max / n_r) * (2 * np.pi / n_phi)
