"""Spin-orbit channel derivative operators on a staggered radial mesh.

In the channel labelled by the nonzero integer kappa, the first-order
part of the radial Dirac system acts on the upper reduced component as

    (D_kappa f)(r) = f'(r) + (kappa/r) f(r).

Discretely, f lives on the N grid nodes while D_kappa f lives on the
N + 1 cell midpoints (one half cell against each end of the truncation
interval).  On the cell with nodes r_left, r_right of width h and
midpoint m, the action is the two-point difference plus the average,

    (D f)(m) = (f_right - f_left)/h + (kappa/m) (f_right + f_left)/2,

both parts second-order exact at m.

Boundary data lives on two ghost nodes.  The outer ghost carries zero:
bound states decay exponentially, so the truncation wall at r_max is
harmless.  The inner ghost depends on the sign of kappa.  For kappa < 0
it carries the regular-branch ratio

    f(ghost) = (ghost/r_min)^s  f(r_min),    s = regular exponent,

because truncating at r_min > 0 would otherwise distort exactly the
feature the operator construction is about: which local solution at the
origin belongs to the domain.  The admissible branch behaves like r^s
(s = sqrt(kappa^2 - nu^2) for a Coulomb tail of strength nu), and a zero
inner ghost (a Dirichlet wall) would charge the critical-coupling state,
whose s = 0 branch tends to a nonzero constant, a spurious ~1/log(r_min)
energy shift; the ratio condition reproduces the branch exactly.  The
soft end is safe on this side because every mass-divergent power r^{-t}
pays kinetic against Coulomb gain in the ratio (t + |kappa|)^2/nu^2 > 1.

For kappa > 0 the inner ghost is zero.  There the derivative has the
singular zero mode r^{-kappa}: against a soft end its truncated copies
pay only a finite one-cell bending cost (which shrinks as the mesh
refines) while collecting the unbounded Coulomb mass gain ~ nu/(2 r_min),
dragging the lowest form level to ~ -10^5 on the default mesh.  A rigid
wall prices that mode at O(1/h) and excludes it; the regular branch has
exponent s >= sqrt(kappa^2 - 1), so it feels the wall only through an
O(r_min^{2s}) level shift, far below mesh error.

The staggering is load-bearing, not a convenience.  Collocating a first
derivative on the nodes themselves with a centered three-point stencil
leaves the sawtooth sublattice almost invisible to it; on a log-uniform
mesh the sawtooth-modulated states turn out to reproduce the channel
-kappa - 2 exactly, so for kappa = -1 every level of the assembled form
appears twice.  With the midpoint difference, oscillating modes cost
O(1/h^2) and sit far above the physical spectrum.

The weighted adjoint is defined algebraically,

    adjoint(D) := W^{-1} D^T M,   W = diag(node weights),
                                  M = diag(cell widths),

which makes <D f, g>_M = <f, adjoint(D) g>_W an identity on every mesh:
self-adjointness of the assembled block Hamiltonian is exact, never a
discretization statement.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .errors import PreconditionError
from .grids import RadialGrid

__all__ = ["ChannelOperator", "build_channel_operator", "regular_exponent"]


def regular_exponent(kappa: int, nu: float) -> float:
    """Near-origin exponent of the admissible local solution, sqrt(kappa^2 - nu^2).

    Requires nu <= |kappa|; above that the channel is supercritical and
    the two local branches cannot be told apart by growth.
    """
    kappa = int(kappa)
    nu = float(nu)
    if nu < 0.0:
        raise PreconditionError(f"coupling must be nonnegative, got {nu}")
    if nu > abs(kappa):
        raise PreconditionError(
            f"supercritical channel: coupling {nu} exceeds |kappa| = {abs(kappa)}")
    return math.sqrt((abs(kappa) - nu) * (abs(kappa) + nu))


@dataclass(frozen=True)
class ChannelOperator:
    """Staggered two-point discretization of D_kappa = d/dr + kappa/r.

    Maps N node values to N + 1 midpoint values.  Cell i sits between
    node i - 1 and node i; cells 0 and N reach the ghost nodes.  The
    outer ghost value is zero and the inner ghost value is inner_ratio
    times the first node value, both already folded into the
    coefficients: (D f)_i = coef_left[i] f_{i-1} + coef_right[i] f_i,
    with coef_left[0] = coef_right[N] = 0 padding the ghost columns.

    ``apply`` computes D f, ``apply_transpose`` the plain transpose
    (midpoints to nodes), and ``apply_adjoint`` the weighted adjoint
    W^{-1} D^T M g whose pairing identity is exact.
    """

    kappa: int
    grid: RadialGrid
    regular_exp: float
    inner_ratio: float
    mid_radii: np.ndarray = field(repr=False)    # (N+1,) cell midpoints
    mid_weights: np.ndarray = field(repr=False)  # (N+1,) cell widths
    coef_left: np.ndarray = field(repr=False)    # (N+1,), [0] = 0
    coef_right: np.ndarray = field(repr=False)   # (N+1,), [-1] = 0

    @property
    def matrix(self) -> scipy.sparse.csr_matrix:
        n = self.grid.n
        return scipy.sparse.diags(
            [self.coef_left[1:], self.coef_right[:-1]], offsets=[-1, 0],
            shape=(n + 1, n), format="csr")

    @property
    def adjoint_matrix(self) -> scipy.sparse.csr_matrix:
        # (W^{-1} D^T M)[j, i] = D[i, j] * m_i / w_j
        w = self.grid.weights
        m = self.mid_weights
        n = self.grid.n
        return scipy.sparse.diags(
            [self.coef_right[:-1] * m[:-1] / w, self.coef_left[1:] * m[1:] / w],
            offsets=[0, 1], shape=(n, n + 1), format="csr")

    def apply(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        y = np.zeros(self.grid.n + 1)
        y[:-1] = self.coef_right[:-1] * f
        y[1:] += self.coef_left[1:] * f
        return y

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.coef_right[:-1] * x[:-1] + self.coef_left[1:] * x[1:]

    def apply_adjoint(self, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        return self.apply_transpose(self.mid_weights * g) / self.grid.weights


def build_channel_operator(kappa: int, grid: RadialGrid,
                           regular_exp: float | None = None) -> ChannelOperator:
    """Assemble the staggered D_kappa on the given mesh.

    kappa must be a nonzero integer; kappa = 0 does not label a channel
    of the three-dimensional reduction.  ``regular_exp`` is the exponent
    s of the admissible near-origin branch r^s folded into the inner
    ghost value for kappa < 0; it defaults to |kappa|, the potential-free
    exponent, and callers with a Coulomb tail pass
    regular_exponent(kappa, nu).  For kappa > 0 the inner ghost is the
    rigid wall value 0 regardless (see the module notes on the r^{-kappa}
    zero mode) and inner_ratio records 0.
    """
    if int(kappa) != kappa or kappa == 0:
        raise PreconditionError(f"kappa must be a nonzero integer, got {kappa!r}")
    kappa = int(kappa)
    if regular_exp is None:
        regular_exp = float(abs(kappa))
    regular_exp = float(regular_exp)
    if not (np.isfinite(regular_exp) and regular_exp >= 0.0):
        raise PreconditionError(
            f"regular exponent must be finite and nonnegative, got {regular_exp}")

    mids, widths = grid.staggered()
    inv_h = 1.0 / widths
    half_kor = 0.5 * kappa / mids

    coef_left = -inv_h + half_kor
    coef_right = inv_h + half_kor
    coef_left[0] = 0.0
    # Inner ghost carries ratio * f(first node); eliminating it folds the
    # ratio into the first node's coefficient on cell 0.  Soft ends are
    # only admissible for kappa < 0 (module notes).
    if kappa < 0:
        ratio = (grid.ghost_nodes()[0] / grid.nodes[0]) ** regular_exp
    else:
        ratio = 0.0
    coef_right[0] = (1.0 - ratio) * inv_h[0] + (1.0 + ratio) * half_kor[0]
    coef_right[-1] = 0.0
    return ChannelOperator(kappa=kappa, grid=grid, regular_exp=regular_exp,
                           inner_ratio=float(ratio), mid_radii=mids,
                           mid_weights=widths, coef_left=coef_left,
                           coef_right=coef_right)
