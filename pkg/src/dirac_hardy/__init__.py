"""Radial Dirac-Coulomb toolkit: Hardy-type form inequalities,
distinguished-extension diagnostics, and variational bound-state solvers
on log-radial meshes.

The package treats one angular momentum channel at a time.  Everything
is built from two discrete objects: a first-order channel derivative
D = d/dr + kappa/r on a quadrature grid, and the shifted quadratic form

    b_gamma(u) = sum w |D u|^2 / (gamma - V) + sum w (2 - gamma + V) |u|^2,

whose lowest level controls both the Hardy-type inequality (b_gamma >= 0
for gamma up to 1 + c(V)) and the point spectrum (mu_k(1 + E) = 0).
"""

from .errors import (
    ConfigError,
    DiracHardyError,
    EigensolverError,
    NoEigenvalueError,
    NoValidShiftError,
    PreconditionError,
    SingularResolventError,
    TheoremHypothesisError,
)
from .extension import (
    DomainDiagnostics,
    ResolventConditioningWarning,
    SpinorPair,
    SymmetryReport,
    apply_hamiltonian,
    domain_diagnostics,
    solve_resolvent,
    symmetry_defect,
)
from .forms import (
    DEFAULT_CHANNELS,
    CoercivityCheck,
    FormMatrix,
    HardyReport,
    ShiftEstimate,
    assemble_form,
    check_coercivity_bound,
    check_gamma_equivalence,
    coercivity_constant,
    estimate_hardy_constant,
    lowest_eigenpairs,
    lowest_eigenvalues,
    mu1_gamma_derivative,
    pointwise_shift_inequality,
    verify_hardy,
)
from .grids import RadialGrid, build_grid, default_grid
from .operators import ChannelOperator, build_channel_operator, regular_exponent
from .potentials import (
    CRITICAL_COUPLING,
    ESSENTIAL_SA_COUPLING,
    KATO_COUPLING,
    RadialPotential,
    make_bounded_perturbed_coulomb,
    make_coulomb,
)
from .shooting import shooting_energy
from .spectrum import (
    SpectralResult,
    dirac_coulomb_energy,
    eigenfunction_exponent,
    find_eigenvalue,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelOperator",
    "CoercivityCheck",
    "ConfigError",
    "CRITICAL_COUPLING",
    "DEFAULT_CHANNELS",
    "DiracHardyError",
    "DomainDiagnostics",
    "EigensolverError",
    "ESSENTIAL_SA_COUPLING",
    "FormMatrix",
    "HardyReport",
    "KATO_COUPLING",
    "NoEigenvalueError",
    "NoValidShiftError",
    "PreconditionError",
    "RadialGrid",
    "RadialPotential",
    "ResolventConditioningWarning",
    "ShiftEstimate",
    "SingularResolventError",
    "SpectralResult",
    "SpinorPair",
    "SymmetryReport",
    "TheoremHypothesisError",
    "apply_hamiltonian",
    "assemble_form",
    "build_channel_operator",
    "build_grid",
    "check_coercivity_bound",
    "check_gamma_equivalence",
    "coercivity_constant",
    "default_grid",
    "dirac_coulomb_energy",
    "domain_diagnostics",
    "eigenfunction_exponent",
    "estimate_hardy_constant",
    "find_eigenvalue",
    "lowest_eigenpairs",
    "lowest_eigenvalues",
    "make_bounded_perturbed_coulomb",
    "make_coulomb",
    "mu1_gamma_derivative",
    "pointwise_shift_inequality",
    "regular_exponent",
    "shooting_energy",
    "solve_resolvent",
    "symmetry_defect",
    "verify_hardy",
    "__version__",
]
