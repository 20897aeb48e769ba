"""Nonlocal Laplacian and biharmonic operators on collar-constrained grids.

Thin wrapper over the C++ core: kernel scalars, grid construction, operator
assembly/application, the constrained solvers and the convergence studies.
"""

from ._nlbiharm import (
    ConfigError,
    Domain,
    Grid,
    NonlocalOperator,
    NumericError,
    SolverError,
    __version__,
    apply,
    apply_biharmonic,
    assemble_laplacian,
    build_grid,
    estimate_coercivity,
    gradient_energy,
    ibp_residual,
    kernel_scalars,
    l2_norm,
    lipschitz_probe,
    mu,
    nonlocal_normal,
    pi_of,
    rho,
    run_study,
    sample_case,
    solve,
)

__all__ = [
    "ConfigError",
    "Domain",
    "Grid",
    "NonlocalOperator",
    "NumericError",
    "SolverError",
    "__version__",
    "apply",
    "apply_biharmonic",
    "assemble_laplacian",
    "build_grid",
    "estimate_coercivity",
    "gradient_energy",
    "ibp_residual",
    "kernel_scalars",
    "l2_norm",
    "lipschitz_probe",
    "mu",
    "nonlocal_normal",
    "pi_of",
    "rho",
    "run_study",
    "sample_case",
    "solve",
]
