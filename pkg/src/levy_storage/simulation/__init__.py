from .streams import INIT_STREAM, PATH_STREAM, PROBE_STREAM, make_stream
from .workload import (DEFAULT_MAX_EVENTS, InitMode, burn_in, default_burn_in_time, exact_probe_values, grid_to_rows,
                       initial_workload, poisson_epochs, sample_grid, sample_jobs, simulate_path, stationary_init,
                       workload_at)

__all__ = [
    "DEFAULT_MAX_EVENTS",
    "INIT_STREAM",
    "InitMode",
    "PATH_STREAM",
    "PROBE_STREAM",
    "burn_in",
    "default_burn_in_time",
    "exact_probe_values",
    "grid_to_rows",
    "initial_workload",
    "make_stream",
    "poisson_epochs",
    "sample_grid",
    "sample_jobs",
    "simulate_path",
    "stationary_init",
    "workload_at",
]
