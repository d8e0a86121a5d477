"""service/estimate.py"""

import numpy as np

from .common import base_metadata, make_row, prepare, resolve_delta, start_and_simulate
from ..estimation.probing import draw_probes, estimate_with_interval, resample_curve
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.report_types import ExperimentReport
from ..simulation.streams import PROBE_STREAM, make_stream
from ..simulation.workload import sample_grid


def run_estimate(config: ExperimentConfig) -> ExperimentReport:
    """One path, one grid, one probe sample: estimates with confidence intervals at every alpha.

    With resample-size K > 1 the resampling estimator on the same grid is reported as well.
    """

    log = get_logger()

    setup = prepare(config)
    delta = resolve_delta(setup, config.horizon)
    path = start_and_simulate(setup, config.horizon, config.seed, 0)
    grid = sample_grid(path, delta)
    sample = draw_probes(grid, config.horizon, config.xi, make_stream(config.seed, 0, PROBE_STREAM))
    log.info(f"Drew {sample.n} probes on {grid.m + 1} grid points.")

    rows = []
    for alpha in config.alphas:
        estimate = estimate_with_interval(sample, alpha, config.level, config.zero_tolerance)
        rows.append(make_row(setup, "single", alpha, delta, config.horizon, estimate.n, estimate.phi_hat,
                             config.seed, estimate.sigma_hat_sq,
                             estimate.ci.lo if estimate.ci else None, estimate.ci.hi if estimate.ci else None))

    if config.resample_size > 1:
        curve = resample_curve(grid, config.horizon, config.xi, config.resample_size, config.alphas,
                               make_stream(config.seed, 0, PROBE_STREAM, 1), config.zero_tolerance)
        mean_n = int(round(float(np.mean(curve.probe_counts))))
        for alpha, value in zip(config.alphas, curve.mean_curve):
            rows.append(make_row(setup, f"resample-K={curve.K}", alpha, delta, config.horizon, mean_n, float(value),
                                 config.seed))

    metadata = base_metadata(setup, "estimate")
    metadata.update({"delta": repr(delta), "n": str(sample.n), "resample_size": str(config.resample_size)})
    return ExperimentReport(rows=rows, metadata=metadata)
