from .exponent import (GammaRange, NetInputModel, asymptotic_variance, bg_index, clt_gamma_range, delta_for_exponent,
                       has_closed_form, mean_input_rate, phi, phi_derivative_at_zero, psi, stationary_atom,
                       stationary_lst, suggest_delta, transient_lst, variance_formula, zero_prob)
from .measure import (DEFAULT_EPSILON, DEFAULT_TABLE_SIZE, GammaTerm, InverseGaussianTerm, LevyDensity,
                      TruncatedCPSpec, build_truncated_cp, laplace_exponent_quadrature, levy_density_of,
                      quantile_function, resolve_compound_poisson, tail_mass, truncated_mean, truncated_rate)

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_TABLE_SIZE",
    "GammaRange",
    "GammaTerm",
    "InverseGaussianTerm",
    "LevyDensity",
    "NetInputModel",
    "TruncatedCPSpec",
    "asymptotic_variance",
    "bg_index",
    "build_truncated_cp",
    "clt_gamma_range",
    "delta_for_exponent",
    "has_closed_form",
    "laplace_exponent_quadrature",
    "levy_density_of",
    "mean_input_rate",
    "phi",
    "phi_derivative_at_zero",
    "psi",
    "quantile_function",
    "resolve_compound_poisson",
    "stationary_atom",
    "stationary_lst",
    "suggest_delta",
    "tail_mass",
    "transient_lst",
    "truncated_mean",
    "truncated_rate",
    "variance_formula",
    "zero_prob",
]
