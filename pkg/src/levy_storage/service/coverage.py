"""service/coverage.py"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .common import ExperimentSetup, base_metadata, make_row, prepare, resolve_delta, sample_variance, \
    start_and_simulate
from ..estimation.probing import draw_probes, estimate_with_interval
from ..levy.exponent import asymptotic_variance
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.report_types import ExperimentReport, ReportRow, SummaryEntry
from ..simulation.streams import PROBE_STREAM, make_stream
from ..simulation.workload import sample_grid


def _replicate(setup: ExperimentSetup, delta: float, replication: int) -> list[ReportRow]:
    config = setup.config
    path = start_and_simulate(setup, config.horizon, config.seed, replication)
    grid = sample_grid(path, delta)
    sample = draw_probes(grid, config.horizon, config.xi, make_stream(config.seed, replication, PROBE_STREAM))

    rows = []
    for alpha in config.alphas:
        estimate = estimate_with_interval(sample, alpha, config.level, config.zero_tolerance)
        rows.append(make_row(setup, str(replication), alpha, delta, config.horizon, estimate.n, estimate.phi_hat,
                             config.seed, estimate.sigma_hat_sq,
                             estimate.ci.lo if estimate.ci else None, estimate.ci.hi if estimate.ci else None))
    get_logger().debug(f"Replication {replication}: n={sample.n}.")
    return rows


def summarise_coverage(setup: ExperimentSetup, rows: list[ReportRow], delta: float) -> list[SummaryEntry]:
    """Per alpha: share of intervals holding the simulated exponent, variance of sqrt(n) (phi_hat - phi) and bias.

    Replications without an interval count as misses.
    """
    config = setup.config
    summary = []
    for alpha in config.alphas:
        selected = [row for row in rows if row.alpha == alpha]
        target = setup.phi_sim(alpha)
        covered = [row.ci_lo is not None and row.ci_lo <= target <= row.ci_hi for row in selected]
        scaled = [math.sqrt(row.n) * (row.phi_hat - target) for row in selected]
        summary.append(SummaryEntry(group="coverage", alpha=alpha, delta=delta, count=len(selected),
                                    coverage=float(np.mean(covered)), empirical_variance=sample_variance(scaled),
                                    reference_variance=asymptotic_variance(setup.sim_model, alpha, config.xi),
                                    bias=float(np.mean([row.phi_hat - target for row in selected]))))
    return summary


def run_coverage(config: ExperimentConfig) -> ExperimentReport:
    """R independent replications of path, grid, probes and confidence intervals.

    Replication r uses the streams keyed (r, purpose), so the first replications do not depend on R. Results are
    collected in replication order regardless of the number of threads.

    Raises:
        - StationarySamplerUnavailableError: If init is stationary and the model has no exact stationary sampler.
    """

    log = get_logger()

    setup = prepare(config, require_stationary=True)
    if setup.init != "stationary":
        log.warning(f"Init '{setup.init}' is not a stationary start; the interval coverage is only approximate.")
    delta = resolve_delta(setup, config.horizon)

    log.info(f"Running {config.replications} replications on {config.threads} thread(s).")
    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        results = list(executor.map(lambda r: _replicate(setup, delta, r), range(config.replications)))
    rows = [row for replication in results for row in replication]

    summary = summarise_coverage(setup, rows, delta)
    for entry in summary:
        log.info(f"alpha={entry.alpha}: coverage {entry.coverage:.4g}, empirical variance {entry.empirical_variance}, "
                 f"reference variance {entry.reference_variance:.6g}.")

    metadata = base_metadata(setup, "coverage")
    metadata.update({"delta": repr(delta), "replications": str(config.replications)})
    return ExperimentReport(rows=rows, summary=summary, metadata=metadata)
