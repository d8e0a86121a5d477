"""service/simulate.py"""

from .common import base_metadata, prepare, resolve_delta, start_and_simulate
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.path_types import GridObservations
from ..simulation.workload import sample_grid


def run_simulate(config: ExperimentConfig) -> tuple[GridObservations, dict[str, str]]:
    """Simulates one path on [0, horizon] and observes it on the configured grid.

    Returns:
        The grid observations and the run metadata.
    """

    log = get_logger()

    setup = prepare(config)
    delta = resolve_delta(setup, config.horizon)
    path = start_and_simulate(setup, config.horizon, config.seed, 0)
    grid = sample_grid(path, delta)

    zero_fraction = float((grid.values == 0.0).mean())
    log.info(f"Simulated {path.event_count} events; {grid.m + 1} grid points, zero fraction {zero_fraction:.6g}.")

    metadata = base_metadata(setup, "simulate")
    metadata.update({"delta": repr(delta), "events": str(path.event_count), "v0_drawn": repr(path.v0),
                     "zero_fraction": repr(zero_fraction)})
    return grid, metadata
