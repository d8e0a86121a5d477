from .probing import (DEFAULT_LEVEL, choose_resample_size, confidence_interval, draw_probes, estimate_curve,
                      estimate_grid, estimate_poisson, estimate_with_interval, normal_interval, plugin_variance,
                      resample_curve, resample_estimate, residuals, round_to_grid)

__all__ = [
    "DEFAULT_LEVEL",
    "choose_resample_size",
    "confidence_interval",
    "draw_probes",
    "estimate_curve",
    "estimate_grid",
    "estimate_poisson",
    "estimate_with_interval",
    "normal_interval",
    "plugin_variance",
    "resample_curve",
    "resample_estimate",
    "residuals",
    "round_to_grid",
]
