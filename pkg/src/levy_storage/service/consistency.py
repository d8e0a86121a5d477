"""service/consistency.py"""

from .common import base_metadata, make_row, prepare, start_and_simulate
from ..estimation.probing import draw_probes, estimate_grid
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.exceptions import ConfigError
from ..schema.report_types import ExperimentReport, SummaryEntry
from ..simulation.streams import PROBE_STREAM, make_stream
from ..simulation.workload import sample_grid


def horizon_schedule(horizon: float, doublings: int) -> list[float]:
    """horizon / 2^d, ..., horizon / 2, horizon."""
    return [horizon / 2 ** (doublings - k) for k in range(doublings + 1)]


def run_consistency(config: ExperimentConfig) -> ExperimentReport:
    """Estimates on one long path over a doubling-horizon schedule, for every grid width in `deltas`.

    All grid widths observe the same path; each (delta, horizon) pair gets its own probe stream. The summary holds
    the final-horizon error against the simulated exponent.
    """

    log = get_logger()

    schedule = horizon_schedule(config.horizon, config.doublings)
    if max(config.deltas) > schedule[0]:
        raise ConfigError(f"Grid widths must not exceed the shortest horizon {schedule[0]:g}", field="deltas")

    setup = prepare(config)
    path = start_and_simulate(setup, config.horizon, config.seed, 0)
    log.info(f"Simulated {path.event_count} events on [0, {config.horizon}].")

    rows, summary = [], []
    for j, delta in enumerate(config.deltas):
        grid = sample_grid(path, delta)
        final = {}
        for k, horizon in enumerate(schedule):
            sample = draw_probes(grid.truncate(horizon), horizon, config.xi,
                                 make_stream(config.seed, 0, PROBE_STREAM, j, k))
            for alpha in config.alphas:
                estimate = estimate_grid(sample, alpha, config.zero_tolerance)
                row = make_row(setup, f"T={horizon:g}", alpha, delta, horizon, estimate.n, estimate.phi_hat,
                               config.seed)
                rows.append(row)
                final[alpha] = row
            log.debug(f"delta={delta}, T={horizon:g}: n={sample.n}.")

        for alpha, row in final.items():
            summary.append(SummaryEntry(group="consistency", alpha=alpha, delta=delta, count=len(schedule),
                                        bias=row.phi_hat - row.phi_sim))
            log.info(f"delta={delta}, alpha={alpha}: final error {row.phi_hat - row.phi_sim:.6g}.")

    metadata = base_metadata(setup, "consistency")
    metadata.update({"deltas": ",".join(repr(d) for d in config.deltas), "doublings": str(config.doublings),
                     "events": str(path.event_count)})
    return ExperimentReport(rows=rows, summary=summary, metadata=metadata)
