"""Constant-curvature graphs in hyperbolic space: curvature functions, solver, checks."""

from ._hyplateau import (
    AdmissibilityError,
    AdmissibilityLost,
    ConfigError,
    CurvatureSpec,
    DomainError,
    NonConvergence,
    algebraic_subinequalities,
    check_conditions,
    check_estimates,
    cone_contains,
    elementary_symmetric,
    eta,
    eval_f,
    grad_f,
    hessian_f,
    hyperbolic_curvatures,
    kappa1_threshold,
    make_cap,
    normalized_Hk,
    solve,
    sup_gradient_sum,
    sup_ratio_assumption,
)

__all__ = [name for name in dir() if not name.startswith("_")]
