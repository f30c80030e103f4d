"""Bound-state energies through roots of the shifted form levels.

E is an eigenvalue of the channel Hamiltonian exactly when the k-th
level mu_k of the form b_gamma crosses zero at gamma = 1 + E: the form
is the Schur complement of H + 1 - gamma, and eliminating the lower
component preserves spectra.  Each mu_k(gamma) is strictly decreasing,
so the crossing is found by plain bisection.

The default ground-state window is (Gamma + 1e-6, 1 + c(V)]: the shift
inequality guarantees mu_1 >= 0 up to the certified top, so the ground
root can only sit at or below it.  Excited levels (k >= 2) lie above
the top in general, and for them the window extends to the gap edge
2 - 1e-6.  When mu_1 stays positive on the whole window, the ground
state is pinned at the certified top within mesh resolution; with a
closed-form sharp constant available this is returned as an
endpoint-flagged result at gamma = 1 + c(V) rather than an error, the
critical-coupling signature (at nu = 1 the top is gamma = 1, E = 0).
Bracketed ground roots landing within a small pad of the top carry the
same flag: the state is the sharpness witness of the inequality.

For a pure Coulomb tail the discrete levels have the closed form

    E(nu, kappa, k) = [1 + nu^2 / (n + sqrt(kappa^2 - nu^2))^2]^(-1/2),

with n = k - 1 for kappa < 0 and n = k for kappa > 0; for n = 0 the
expression collapses to sqrt(kappa^2 - nu^2)/|kappa|, which is used
verbatim so the kappa = -1 ground level reproduces sqrt(1 - nu^2) to
the last bit and degenerates smoothly to 0 at critical coupling.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoEigenvalueError, PreconditionError
from .extension import SpinorPair
from .forms import (assemble_form, estimate_hardy_constant, lowest_eigenpairs,
                    lowest_eigenvalues)
from .grids import RadialGrid
from .operators import regular_exponent
from .potentials import RadialPotential

__all__ = [
    "SpectralResult",
    "dirac_coulomb_energy",
    "find_eigenvalue",
    "eigenfunction_exponent",
]

DEFAULT_TOL_GAMMA = 1e-8
DEFAULT_TOL_MU = 1e-7
# A bracketed ground root within this distance of the certified window
# top is the sharpness witness of the inequality; mesh bias moves the
# root by well under 1e-3 while neighbouring levels sit ~0.1 away.
ENDPOINT_PAD = 1e-2
# Largest mu_1 margin at the hinted top still read as "level pinned at
# the endpoint" rather than "no level at all" (V = 0 leaves margins of
# order 1; critical Coulomb leaves ~1e-6).
ENDPOINT_MARGIN_TOL = 0.25
GAP_EDGE_MARGIN = 1e-6


def dirac_coulomb_energy(nu: float, kappa: int, k: int) -> float:
    """Closed-form k-th bound energy of the -nu/r channel Hamiltonian.

    Requires 0 < nu <= |kappa| (a channel with nu > |kappa| is
    supercritical: the near-origin exponent sqrt(kappa^2 - nu^2) leaves
    the real axis and no distinguished level survives).
    """
    nu = float(nu)
    kappa = int(kappa)
    k = int(k)
    if kappa == 0:
        raise PreconditionError("kappa must be a nonzero integer")
    if k < 1:
        raise PreconditionError(f"level index must satisfy k >= 1, got {k}")
    if not (0.0 < nu <= abs(kappa)):
        raise PreconditionError(
            f"supercritical channel: need 0 < nu <= |kappa|, got nu = {nu}, "
            f"kappa = {kappa}")
    s = math.sqrt((kappa - nu) * (kappa + nu)) if kappa > 0 else \
        math.sqrt((-kappa - nu) * (-kappa + nu))
    n = k - 1 if kappa < 0 else k
    if n == 0:
        return s / abs(kappa)
    return 1.0 / math.sqrt(1.0 + (nu / (n + s)) ** 2)


@dataclass(frozen=True)
class SpectralResult:
    """One located channel level with its certificate.

    bracket is the final bisection bracket in gamma, mu_at_root the form
    level there, and flag is None or "endpoint" (root at the certified
    Hardy-window top, the critical-coupling signature for the ground
    state).  gamma_star = 1 + E.  A level pinned at the top without a
    sign change carries a degenerate bracket (top, top) and a positive
    mu_at_root, the residual margin; bisected roots have |mu| <= tol_mu.
    """

    E: float
    gamma_star: float
    kappa: int
    k: int
    mu_at_root: float
    pair: SpinorPair = field(repr=False)
    bracket: tuple[float, float]
    grid_meta: dict
    flag: str | None

    @property
    def phi(self) -> np.ndarray:
        return self.pair.phi

    @property
    def chi(self) -> np.ndarray:
        return self.pair.chi


def _integrate_bound_pair(nu: float, kappa: int, E: float,
                          grid: RadialGrid) -> SpinorPair:
    """Regular-branch channel eigenstate at energy E, sampled on the mesh.

    Integrates the first-order system

        phi' = -(kappa/r) phi + (gamma - V) chi,
        chi' =  (kappa/r) chi + (2 - gamma + V) phi,

    for V = -nu/r and gamma = 1 + E in log-radius coordinates, where the
    Coulomb coefficients are smooth down to r = 0.  The sweep outward
    from the regular seed (phi, chi) ~ (1, (s + kappa)/nu) r^s carries
    the admissible branch, the sweep inward from the decaying tail
    (1, -lambda/gamma) e^{-lambda r} carries the normalizable one, and
    the two are spliced at the node nearest r = 1; each direction is
    stable against its contaminant mode.  Used for endpoint-pinned
    levels, where E is exact and the variational eigenvector is not a
    faithful rendering of the state.

    The samples satisfy the interior difference stencil to truncation
    error, but not the first node row of the discrete Hamiltonian: that
    row encodes the ghost-elimination closure, which only the discrete
    eigenvector's own boundary-cell values can balance.  Residual-based
    acceptance therefore applies to bracketed results only.
    """
    gamma = 1.0 + E
    s = regular_exponent(kappa, nu)
    mids, _ = grid.staggered()
    pts = np.empty(2 * grid.n + 1)
    pts[0::2] = mids
    pts[1::2] = grid.nodes
    t = np.log(pts)

    def step(tj, y, h):
        # RK4 on y_t = F(t, y), F smooth in t = log r for a Coulomb tail
        def F(tt, yy):
            r = math.exp(tt)
            return np.array([
                -kappa * yy[0] + (gamma * r + nu) * yy[1],
                kappa * yy[1] + ((2.0 - gamma) * r - nu) * yy[0]])
        k1 = F(tj, y)
        k2 = F(tj + 0.5 * h, y + 0.5 * h * k1)
        k3 = F(tj + 0.5 * h, y + 0.5 * h * k2)
        k4 = F(tj + h, y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    jm = int(np.argmin(np.abs(pts - min(1.0, 0.25 * grid.r_max))))
    jm = max(1, min(jm, pts.size - 2))

    out = np.empty((jm + 1, 2))
    out[0] = (pts[0] ** s, ((s + kappa) / nu) * pts[0] ** s)
    for j in range(jm):
        out[j + 1] = step(t[j], out[j], t[j + 1] - t[j])

    lam = math.sqrt(gamma * (2.0 - gamma))
    inw = np.empty((pts.size - jm, 2))
    inw[-1] = (1.0, -lam / gamma)
    for j in range(pts.size - 1, jm, -1):
        inw[j - jm - 1] = step(t[j], inw[j - jm], t[j - 1] - t[j])

    scale = out[jm, 0] / inw[0, 0]
    y = np.vstack([out, scale * inw[1:]])
    phi = y[1::2, 0]
    chi = y[0::2, 1]
    norm = math.sqrt(float(np.sum(grid.weights * phi * phi)))
    sign = 1.0 if phi[int(np.argmax(np.abs(phi)))] >= 0.0 else -1.0
    return SpinorPair(phi=sign * phi / norm, chi=sign * chi / norm,
                      kappa=int(kappa), grid=grid)


def find_eigenvalue(potential: RadialPotential, kappa: int, k: int,
                    grid: RadialGrid | None = None,
                    tol_gamma: float = DEFAULT_TOL_GAMMA,
                    tol_mu: float = DEFAULT_TOL_MU,
                    window: tuple[float, float] | None = None) -> SpectralResult:
    """Locate the k-th channel level by bisection on mu_k(1 + E) = 0.

    For the binding channel (kappa = -1 carries the state attaining the
    sharp constant of an attractive Coulomb tail) at k = 1, the default
    window is (Gamma + 1e-6, 1 + c(V)]: the shift inequality keeps mu_1
    nonnegative up to the certified top, so the ground root cannot lie
    beyond it, and any crossing above the top is a truncation ghost
    (the margin at the top decays only like 1/log(1/r_min), so the
    artificial crossing sits ~0.08 above the top on the default mesh
    at critical coupling, stable under mesh refinement).  c(V) is the
    potential's closed form when it carries one, else the bisected
    estimate padded by its bracket width.  All other channels and all
    k >= 2 search the whole gap up to 2 - 1e-6: their levels sit above
    the certified top legitimately.  Pass ``window`` to override.

    When mu_1 is still positive at a hinted binding-channel top, the
    level is pinned at the endpoint: the result carries
    gamma_star = 1 + c(V), flag "endpoint", a degenerate bracket, and
    the residual margin in mu_at_root, which is then positive rather
    than |mu| <= tol_mu.  Its pair is the regular-branch solution of
    the channel system integrated at E = c(V) (the margin minimizer is
    a truncation artifact that folds in the second local branch, so it
    misrepresents the near-origin state).  Without a hint, or with a
    margin too large to be a pinned level, NoEigenvalueError is raised
    with the margin attached.  PreconditionError signals a malformed
    window or one already below the k-th root at its bottom.
    """
    if grid is None:
        from .grids import default_grid
        grid = default_grid()
    k = int(k)
    if k < 1:
        raise PreconditionError(f"level index must satisfy k >= 1, got {k}")

    G = potential.Gamma
    binding = (k == 1 and kappa == -1)
    if window is None:
        lo = G + 1e-6
        if binding and potential.cV_hint is not None:
            hi = 1.0 + potential.cV_hint
        elif binding:
            est = estimate_hardy_constant(potential, grid, channels=(kappa,))
            hi = min(1.0 + est.value + 2.0 * est.tol, 2.0 - GAP_EDGE_MARGIN)
        else:
            hi = 2.0 - GAP_EDGE_MARGIN
    else:
        lo, hi = float(window[0]), float(window[1])
        if not (G < lo < hi <= 2.0):
            raise PreconditionError(
                f"invalid window: need Gamma < lo < hi <= 2, got ({lo}, {hi})")

    def mu_k(gamma):
        form = assemble_form(potential, gamma, kappa, grid)
        return lowest_eigenvalues(form, k)[k - 1]

    if mu_k(lo) <= 0.0:
        raise PreconditionError(
            f"window bottom already past the k-th root: mu_{k} <= 0 at gamma = {lo}")
    margin = mu_k(hi)
    if margin > 0.0:
        hint = potential.cV_hint
        top = 1.0 + hint if hint is not None else math.inf
        if binding and hint is not None and hi >= top - tol_gamma \
                and margin <= ENDPOINT_MARGIN_TOL:
            gamma_top = min(hi, top)
            mu_top = mu_k(gamma_top) if gamma_top < hi else margin
            pair = _integrate_bound_pair(potential.nu, kappa, hint, grid)
            return SpectralResult(E=gamma_top - 1.0, gamma_star=gamma_top,
                                  kappa=int(kappa), k=k, mu_at_root=mu_top,
                                  pair=pair, bracket=(gamma_top, gamma_top),
                                  grid_meta=grid.metadata(), flag="endpoint")
        raise NoEigenvalueError(
            f"mu_{k} stays positive on the whole window (margin {margin:.3e} "
            f"at gamma = {hi}); no level of index {k} on this mesh",
            margin=margin)

    # Bisect well past tol_gamma: |d mu_k / d gamma| >= 1, so the extra
    # width resolution also pins the level value through tol_mu.
    width_target = min(tol_gamma, 1e-10)
    while hi - lo > width_target:
        mid = 0.5 * (lo + hi)
        if mu_k(mid) < 0.0:
            hi = mid
        else:
            lo = mid

    gamma_star = 0.5 * (lo + hi)
    form = assemble_form(potential, gamma_star, kappa, grid)
    mu_star, u = lowest_eigenpairs(form, k)[k - 1]
    extra = 0
    while abs(mu_star) > tol_mu and hi - lo > 1e-15 and extra < 40:
        if mu_star > 0.0:
            lo = gamma_star
        else:
            hi = gamma_star
        gamma_star = 0.5 * (lo + hi)
        form = assemble_form(potential, gamma_star, kappa, grid)
        mu_star, u = lowest_eigenpairs(form, k)[k - 1]
        extra += 1

    chi = form.operator.apply(u) / (gamma_star - form.v_mid)
    pair = SpinorPair(phi=u, chi=chi, kappa=int(kappa), grid=grid)

    flag = None
    if potential.cV_hint is not None:
        top = 1.0 + potential.cV_hint
        if abs(gamma_star - top) <= ENDPOINT_PAD:
            flag = "endpoint"

    return SpectralResult(E=gamma_star - 1.0, gamma_star=gamma_star,
                          kappa=int(kappa), k=k, mu_at_root=mu_star, pair=pair,
                          bracket=(lo, hi), grid_meta=grid.metadata(), flag=flag)


def eigenfunction_exponent(phi: np.ndarray, grid: RadialGrid,
                           window: tuple[float, float] | None = None) -> float:
    """Near-origin power of a channel state by log-log least squares.

    Fits log|phi| against log r over grid nodes with r inside ``window``,
    by default the first decade of nodes [r_min, 10 r_min].  The inner
    closure of the derivative operator pins computed states to the
    admissible local power there, so the fitted slope reads off that
    power directly: sqrt(kappa^2 - nu^2) for a Coulomb tail, dropping to
    0 at critical coupling.
    """
    phi = np.asarray(phi, dtype=float)
    r = grid.nodes
    if phi.shape != r.shape:
        raise PreconditionError("phi must live on the grid nodes")
    if window is None:
        window = (grid.r_min, 10.0 * grid.r_min)
    r_lo, r_hi = float(window[0]), float(window[1])
    if not (grid.r_min <= r_lo < r_hi <= grid.r_max):
        raise PreconditionError("fit window must lie inside [r_min, r_max]")

    mask = (r >= r_lo) & (r <= r_hi)
    vals = np.abs(phi[mask])
    radii = r[mask]
    keep = vals > vals.max() * 1e-13 if vals.size else np.zeros(0, dtype=bool)
    if int(keep.sum()) < 8:
        raise PreconditionError(
            f"fit window [{r_lo}, {r_hi}] covers fewer than 8 usable nodes")
    slope = np.polyfit(np.log(radii[keep]), np.log(vals[keep]), 1)[0]
    return float(slope)
