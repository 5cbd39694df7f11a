"""Exponential Lawson-DG solvers for Vlasov-Ampere and Vlasov-Maxwell equations."""

from .dg_core import (
    DGField,
    DGSpace,
    FluxKind,
    LocalMatrices,
    assemble_advection_matrix,
    build_local_matrices,
    l2_norm,
    project_initial,
    reconstruct,
)
from .exp_ops import (
    EigenFactorization,
    ExpCache,
    KernelBasis,
    Projector,
    UnsupportedConfigError,
    alpha_scalar,
    beta_scalar,
    build_exp_cache,
    build_projector,
    eigen_factorize,
    eigen_factorize_central,
    exp_apply,
    kernel_basis,
    kron_exp_apply,
    phi_alpha_beta,
)
from .lawson import ButcherTableau, builtin_tableaux, lawson_step, required_fractions
from .models import (
    FourierVMModel,
    TransportModel2D,
    VlasovAmpereModel,
    VlasovMaxwellDGModel,
    solve_initial_poisson,
)
from .phase_space import (
    DerivativeScheme,
    FieldMultiplier,
    VelocityGrid,
    apply_derivative,
    apply_derivative_periodic,
    build_field_multiplier,
    vlasov_ampere_nonlinear,
    vlasov_maxwell_nonlinear,
)
from .diagnostics import RateFit, TimeSeries, energy_correction, fit_rate

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
