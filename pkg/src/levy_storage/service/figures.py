"""service/figures.py"""

from .common import ExperimentSetup, alpha_grid, base_metadata, make_row, prepare, resolve_delta, start_and_simulate
from ..estimation.probing import draw_probes, estimate_curve, estimate_with_interval, resample_curve
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.report_types import ExperimentReport, ReportRow
from ..simulation.streams import PROBE_STREAM, make_stream
from ..simulation.workload import sample_grid

# Replication keys of the three figure paths
_PROBE_FIGURE, _INTERVAL_FIGURE, _RESAMPLE_FIGURE = 0, 1, 2


def _probe_figure(setup: ExperimentSetup, alphas) -> list[ReportRow]:
    """Several estimates from independent probe draws on one path."""
    config, figures = setup.config, setup.config.figures
    path = start_and_simulate(setup, figures.probe_horizon, config.seed, _PROBE_FIGURE)
    grid = sample_grid(path, figures.probe_delta)

    rows = []
    for realisation in range(figures.probe_realisations):
        sample = draw_probes(grid, figures.probe_horizon, config.xi,
                             make_stream(config.seed, _PROBE_FIGURE, PROBE_STREAM, realisation))
        for alpha, value in zip(alphas, estimate_curve(sample, alphas, config.zero_tolerance)):
            rows.append(make_row(setup, f"probes-{realisation}", float(alpha), grid.delta, figures.probe_horizon,
                                 sample.n, float(value), config.seed))
    return rows


def _interval_figure(setup: ExperimentSetup, alphas) -> list[ReportRow]:
    """One estimate with its pointwise confidence band."""
    config, figures = setup.config, setup.config.figures
    delta = resolve_delta(setup, figures.interval_horizon, figures.interval_delta)
    path = start_and_simulate(setup, figures.interval_horizon, config.seed, _INTERVAL_FIGURE)
    grid = sample_grid(path, delta)
    sample = draw_probes(grid, figures.interval_horizon, config.xi,
                         make_stream(config.seed, _INTERVAL_FIGURE, PROBE_STREAM))

    rows = []
    for alpha in alphas:
        alpha = float(alpha)
        if alpha == 0.0:
            rows.append(make_row(setup, "interval", alpha, delta, figures.interval_horizon, sample.n, 0.0,
                                 config.seed))
            continue
        estimate = estimate_with_interval(sample, alpha, config.level, config.zero_tolerance)
        rows.append(make_row(setup, "interval", alpha, delta, figures.interval_horizon, estimate.n, estimate.phi_hat,
                             config.seed, estimate.sigma_hat_sq,
                             estimate.ci.lo if estimate.ci else None, estimate.ci.hi if estimate.ci else None))
    return rows


def _resampling_figure(setup: ExperimentSetup, alphas) -> list[ReportRow]:
    """Pairs of resampling estimates per grid width, all on one path."""
    config, figures = setup.config, setup.config.figures
    path = start_and_simulate(setup, figures.resample_horizon, config.seed, _RESAMPLE_FIGURE)

    rows = []
    for j, delta in enumerate(figures.resample_deltas):
        grid = sample_grid(path, delta)
        for realisation in range(figures.resample_realisations):
            curve = resample_curve(grid, figures.resample_horizon, config.xi, figures.resample_size, alphas,
                                   make_stream(config.seed, _RESAMPLE_FIGURE, PROBE_STREAM, j, realisation),
                                   config.zero_tolerance)
            mean_n = int(round(float(curve.probe_counts.mean())))
            for alpha, value in zip(alphas, curve.mean_curve):
                rows.append(make_row(setup, f"resample-{realisation}", float(alpha), delta,
                                     figures.resample_horizon, mean_n, float(value), config.seed))
    return rows


def run_figures(config: ExperimentConfig) -> ExperimentReport:
    """Curve data for plotting: the true and simulated exponents next to estimates, on an alpha grid from 0.

    Three data sets, told apart by experiment_id: `probes-i` (several probe draws on one path), `interval` (an
    estimate with its confidence band) and `resample-i` (resampling estimates per grid width).
    """

    log = get_logger()

    setup = prepare(config)
    figures = config.figures
    alphas = alpha_grid(figures.alpha_max, figures.alpha_step)

    rows = _probe_figure(setup, alphas)
    log.info("Probe figure data done.")
    rows += _interval_figure(setup, alphas)
    log.info("Interval figure data done.")
    rows += _resampling_figure(setup, alphas)
    log.info("Resampling figure data done.")

    metadata = base_metadata(setup, "figures")
    metadata.update({"figures": figures.model_dump_json(by_alias=True)})
    return ExperimentReport(rows=rows, metadata=metadata)
