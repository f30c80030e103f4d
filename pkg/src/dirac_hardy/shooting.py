"""Independent bound-state oracle: two-sided shooting on the radial ODE.

The first-order channel system for the radial components (f, g) at
energy E (gamma = 1 + E, V = -nu/r) reads

    f'(r) = -(kappa/r) f + (gamma - V) g
    g'(r) = (2 - gamma + V) f + (kappa/r) g

A bound state is a solution regular at the origin (f ~ r^s with
s = sqrt(kappa^2 - nu^2), g/f -> (s + kappa)/nu) that also decays at
infinity (g/f -> -sqrt((1 - E)/(1 + E))).  Integrating the regular
solution outward and the decaying one inward to a midpoint, E is an
eigenvalue exactly when the two are proportional there, i.e. when the
2x2 matching determinant vanishes.

This module shares nothing with the variational solver: no grids, no
quadratic forms, no banded eigensolvers.  It is a fixed-step RK4 march
(log-spaced outward, linear inward) plus a sign scan and brentq polish,
and exists solely to cross-check the variational energies.
"""

import math

import numpy as np
from scipy.optimize import brentq

from .errors import NoEigenvalueError, PreconditionError

__all__ = ["shooting_energy"]

_E_SCAN_LO = 0.05
_E_SCAN_HI = 0.995
_E_SCAN_STEP = 0.002


def _stage_coeffs(radii: np.ndarray, nu: float, kappa: int):
    """kappa/r and V(r) at every RK4 stage radius of a step sequence."""
    r0 = radii[:-1]
    r1 = radii[1:]
    rm = 0.5 * (r0 + r1)
    h = r1 - r0
    coeffs = []
    for r in (r0, rm, r1):
        coeffs.append((kappa / r, -nu / r))
    return h, coeffs


def _march(f, g, h, coeffs, gamma):
    """Vectorised RK4 over a fixed radius ladder; gamma may be an array.

    f, g have the scan shape; each step uses the three precomputed
    stage coefficient arrays (origin, midpoint, end of step).
    """
    (p0, v0), (pm, vm), (p1, v1) = coeffs
    n = h.shape[0]
    for i in range(n):
        hi = h[i]
        a0, b0 = p0[i], v0[i]
        am, bm = pm[i], vm[i]
        a1, b1 = p1[i], v1[i]

        k1f = -a0 * f + (gamma - b0) * g
        k1g = (2.0 - gamma + b0) * f + a0 * g

        f2 = f + 0.5 * hi * k1f
        g2 = g + 0.5 * hi * k1g
        k2f = -am * f2 + (gamma - bm) * g2
        k2g = (2.0 - gamma + bm) * f2 + am * g2

        f3 = f + 0.5 * hi * k2f
        g3 = g + 0.5 * hi * k2g
        k3f = -am * f3 + (gamma - bm) * g3
        k3g = (2.0 - gamma + bm) * f3 + am * g3

        f4 = f + hi * k3f
        g4 = g + hi * k3g
        k4f = -a1 * f4 + (gamma - b1) * g4
        k4g = (2.0 - gamma + b1) * f4 + a1 * g4

        f = f + (hi / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        g = g + (hi / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        # Renormalise every so often: the inward solution grows by
        # e^(lambda * span) toward the matching point.
        if i % 256 == 255:
            scale = np.maximum(np.hypot(np.abs(f), np.abs(g)), 1e-280)
            f = f / scale
            g = g / scale
    return f, g


def _match_determinant(E, nu, kappa, r_match, n_out=2400, n_in=3200):
    """f_out g_in - f_in g_out at r_match for an array of energies."""
    E = np.asarray(E, dtype=float)
    gamma = 1.0 + E
    s = math.sqrt(kappa * kappa - nu * nu)

    r_start = 1e-8
    out_radii = np.geomspace(r_start, r_match, n_out + 1)
    h_out, c_out = _stage_coeffs(out_radii, nu, kappa)
    f0 = np.full(E.shape, r_start ** s)
    g0 = f0 * ((s + kappa) / nu)
    f_out, g_out = _march(f0, g0, h_out, c_out, gamma)

    lam = np.sqrt(np.maximum((1.0 - E) * (1.0 + E), 1e-12))
    r_far = r_match + 40.0 / float(np.min(lam))
    in_radii = np.linspace(r_far, r_match, n_in + 1)
    h_in, c_in = _stage_coeffs(in_radii, nu, kappa)
    f1 = np.ones(E.shape)
    g1 = -np.sqrt((1.0 - E) / (1.0 + E))
    f_in, g_in = _march(f1, g1, h_in, c_in, gamma)

    norm_out = np.hypot(f_out, g_out)
    norm_in = np.hypot(f_in, g_in)
    return (f_out * g_in - f_in * g_out) / (norm_out * norm_in)


def shooting_energy(nu: float, kappa: int = -1, k: int = 1,
                    r_match: float = 1.0, xtol: float = 1e-10) -> float:
    """k-th bound energy by two-sided shooting (kappa = -1, k <= 2).

    Scans the matching determinant over E in (0.05, 0.995), brackets its
    k-th sign change and polishes with brentq.  Raises PreconditionError
    outside the supported channel and NoEigenvalueError when fewer than
    k sign changes fall inside the scan window.
    """
    nu = float(nu)
    kappa = int(kappa)
    k = int(k)
    if kappa != -1:
        raise PreconditionError(
            f"shooting oracle supports the kappa = -1 channel only, got {kappa}")
    if k not in (1, 2):
        raise PreconditionError(f"shooting oracle supports k in (1, 2), got {k}")
    if not (0.0 < nu < 1.0):
        raise PreconditionError(
            f"shooting oracle needs 0 < nu < 1, got nu = {nu}")

    grid_E = np.arange(_E_SCAN_LO, _E_SCAN_HI, _E_SCAN_STEP)
    dets = _match_determinant(grid_E, nu, kappa, r_match)
    flips = np.nonzero(np.sign(dets[:-1]) * np.sign(dets[1:]) < 0)[0]
    if flips.size < k:
        raise NoEigenvalueError(
            f"found only {flips.size} sign changes in the scan window, "
            f"needed {k}", margin=float(np.min(np.abs(dets))))

    i = int(flips[k - 1])
    a, b = float(grid_E[i]), float(grid_E[i + 1])

    def det_scalar(E):
        return float(_match_determinant(np.array([E]), nu, kappa, r_match)[0])

    return float(brentq(det_scalar, a, b, xtol=xtol, rtol=1e-14))
