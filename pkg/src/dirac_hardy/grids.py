"""Radial meshes on (0, infinity) truncated to [r_min, r_max].

Conventions
-----------
* Nodes r_1 < ... < r_N with r_1 = r_min > 0 and r_N = r_max.
* Quadrature is trapezoidal: w_i = (r_{i+1} - r_{i-1})/2 on interior
  nodes and half-cells at the ends, so sum(w) telescopes to exactly
  r_max - r_min.  All weighted inner products in the package are
  <f, g>_w = sum_i w_i f_i g_i, the L^2(dr) pairing of reduced radial
  components (no r^2 Jacobian; the reduction f(r)/r times a spherical
  spinor already absorbs it).
* Two schemes: "uniform" and "log-uniform".  The log-uniform mesh keeps
  log(r_{i+1}/r_i) constant, which is what resolves the r -> 0 region
  where Coulomb terms are singular.
* Derivative stencils at the first and last node reference ghost nodes
  one step outside each end; ghost_nodes() returns those two radii.  The
  boundary data carried on the ghosts is the channel operators' concern
  (zero at the outer truncation, a regular-branch ratio at the inner
  one); the grid only guarantees both ghost radii are positive.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

__all__ = ["RadialGrid", "build_grid", "default_grid"]

SCHEMES = ("uniform", "log-uniform")

#: Default truncation and resolution used by the verification defaults and
#: the CLI when a config omits the grid block.
DEFAULT_R_MIN = 1e-6
DEFAULT_R_MAX = 60.0
DEFAULT_N = 4000
DEFAULT_SCHEME = "log-uniform"


@dataclass(frozen=True)
class RadialGrid:
    """Truncated radial mesh plus trapezoidal quadrature weights.

    Attributes
    ----------
    nodes : ndarray, shape (N,)
        Strictly increasing radii, nodes[0] = r_min, nodes[-1] = r_max.
    weights : ndarray, shape (N,)
        Positive trapezoidal weights; weights.sum() == r_max - r_min.
    r_min, r_max : float
    scheme : str
        "uniform" or "log-uniform".
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    r_min: float
    r_max: float
    scheme: str

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if r.ndim != 1 or r.shape != w.shape:
            raise PreconditionError("nodes and weights must be 1-d arrays of equal length")
        if r.size < 16:
            raise PreconditionError(f"too few nodes: N = {r.size} < 16")
        if not (self.r_min > 0.0):
            raise PreconditionError(f"r_min must be positive, got {self.r_min}")
        if not (self.r_max > self.r_min):
            raise PreconditionError(f"need r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if np.any(np.diff(r) <= 0.0):
            raise PreconditionError("nodes must be strictly increasing")
        if np.any(w <= 0.0):
            raise PreconditionError("quadrature weights must be positive")
        if self.scheme not in SCHEMES:
            raise PreconditionError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")

    @property
    def n(self) -> int:
        return self.nodes.size

    def ghost_nodes(self) -> tuple[float, float]:
        """Radii one mesh step outside each end.

        The inner ghost is always the geometric reflection r_1^2/r_2: it
        follows the mesh law exactly on a log-uniform mesh, agrees with
        linear extrapolation to second order on a uniform one, and stays
        positive on any mesh (a linearly extrapolated inner ghost would
        go negative whenever the spacing exceeds r_min).  The outer ghost
        follows the mesh law of the scheme.
        """
        r = self.nodes
        g_lo = float(r[0] ** 2 / r[1])
        if self.scheme == "log-uniform":
            return g_lo, float(r[-1] ** 2 / r[-2])
        return g_lo, float(2.0 * r[-1] - r[-2])

    def staggered(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell midpoints and widths of the mesh extended by its ghosts.

        There are N + 1 cells: one between the inner ghost and the first
        node, one between each pair of consecutive nodes, and one between
        the last node and the outer ghost.  Channel derivatives and lower
        spinor components live on these midpoints; the widths are their
        quadrature weights (midpoint rule).
        """
        g_lo, g_hi = self.ghost_nodes()
        ladder = np.concatenate(([g_lo], self.nodes, [g_hi]))
        return 0.5 * (ladder[:-1] + ladder[1:]), np.diff(ladder)

    def metadata(self) -> dict:
        """Plain-dict description, used by result records and manifests."""
        return {
            "r_min": self.r_min,
            "r_max": self.r_max,
            "N": self.n,
            "scheme": self.scheme,
        }


def _trapezoid_weights(r: np.ndarray) -> np.ndarray:
    w = np.empty_like(r)
    w[1:-1] = 0.5 * (r[2:] - r[:-2])
    w[0] = 0.5 * (r[1] - r[0])
    w[-1] = 0.5 * (r[-1] - r[-2])
    return w


def build_grid(r_min: float, r_max: float, n: int, scheme: str = DEFAULT_SCHEME) -> RadialGrid:
    """Build a radial mesh with trapezoidal weights.

    Parameters
    ----------
    r_min, r_max : float
        Truncation radii, 0 < r_min < r_max.
    n : int
        Node count, at least 16.
    scheme : str
        "uniform" or "log-uniform".
    """
    if not np.isfinite(r_min) or not np.isfinite(r_max):
        raise PreconditionError("r_min and r_max must be finite")
    if not (0.0 < r_min < r_max):
        raise PreconditionError(f"need 0 < r_min < r_max, got [{r_min}, {r_max}]")
    n = int(n)
    if n < 16:
        raise PreconditionError(f"too few nodes: N = {n} < 16")
    if scheme not in SCHEMES:
        raise PreconditionError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")

    if scheme == "uniform":
        nodes = np.linspace(r_min, r_max, n)
    else:
        nodes = np.geomspace(r_min, r_max, n)
    weights = _trapezoid_weights(nodes)
    return RadialGrid(nodes=nodes, weights=weights, r_min=float(r_min),
                      r_max=float(r_max), scheme=scheme)


def default_grid() -> RadialGrid:
    """The package-wide default mesh: log-uniform, [1e-6, 60], N = 4000."""
    return build_grid(DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_N, DEFAULT_SCHEME)
