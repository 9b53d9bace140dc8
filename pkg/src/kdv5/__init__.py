"""Pseudospectral fifth-order KdV hierarchy simulator and diagnostics.

Layers
------
spectral      periodic grid, transforms, multipliers, Sobolev norms
schrodinger   diagonal Green's function, density, alpha, change of variables
hamiltonians  polynomial invariants and their variational derivatives
flows         commuting-flow vector fields and the integrating-factor RK4
diagnostics   identity residuals, currents, local smoothing, kappa studies
fields        standard initial data and seeded random test fields
cli           experiment runner (config -> studies -> CSV/JSON-lines)
"""

from .spectral import (
    Field,
    Grid,
    Symbol,
    apply_multiplier,
    dealiased_cube,
    dealiased_product,
    derivative_symbol,
    inner,
    integral,
    resolvent_symbol,
    sobolev_norm,
)
from .fields import cosine_field, gaussian_field, random_field, soliton_field
from .schrodinger import (
    GreenReport,
    alpha_of,
    diffeo_forward,
    diffeo_inverse,
    green_diagonal_direct,
    green_diagonal_series,
    h1,
    h2,
    h_ell_series,
)
from .hamiltonians import (
    ConservedReport,
    conserved_report,
    energy_fifth,
    energy_kdv,
    grad_H5th,
    grad_HKdV,
    grad_P,
    h_kappa_value,
    mass,
    momentum,
)
from .flows import (
    FlowSpec,
    IntegratorConfig,
    TrajectoryRecord,
    integrate,
    rhs,
    rhs_difference,
    rhs_fifth,
    rhs_hkappa,
    rhs_kdv,
)
from .diagnostics import (
    IdentityResiduals,
    LSReport,
    WeightFamily,
    current_j5th,
    current_jkappa,
    identity_check,
    kappa_convergence_study,
    ls_norm,
    microscopic_residual,
)

__all__ = [
    "Field", "Grid", "Symbol", "apply_multiplier", "dealiased_cube",
    "dealiased_product", "derivative_symbol", "inner", "integral",
    "resolvent_symbol", "sobolev_norm",
    "cosine_field", "gaussian_field", "random_field", "soliton_field",
    "GreenReport", "alpha_of", "diffeo_forward", "diffeo_inverse",
    "green_diagonal_direct", "green_diagonal_series", "h1", "h2", "h_ell_series",
    "ConservedReport", "conserved_report", "energy_fifth", "energy_kdv",
    "grad_H5th", "grad_HKdV", "grad_P", "h_kappa_value", "mass", "momentum",
    "FlowSpec", "IntegratorConfig", "TrajectoryRecord", "integrate", "rhs",
    "rhs_difference", "rhs_fifth", "rhs_hkappa", "rhs_kdv",
    "IdentityResiduals", "LSReport", "WeightFamily", "current_j5th",
    "current_jkappa", "identity_check", "kappa_convergence_study", "ls_norm",
    "microscopic_residual",
]

__version__ = "0.1.0"
