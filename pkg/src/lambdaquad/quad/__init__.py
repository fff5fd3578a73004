from .factors import (
    DependenceCheck,
    I_forms,
    auxiliary_factor,
    auxiliary_relation_residual,
    cross_identity_residual,
    divergence_residual,
    first_order_factor_residual,
    integrating_factor_identities,
    integrating_factors,
    jacobi_last_multiplier,
    reduced_box,
    reduced_dependence,
    reduced_integrating_factors,
    reduced_rhs_residual,
    solved_I_forms,
    w_forms,
)
from .forms import (
    NoAdmissiblePath,
    OneForm,
    PathIntegrator,
    Potential,
    QuadratureResult,
    closedness_residuals,
    path_integrate,
)
from .gk import QuadratureError, gk15, integrate
