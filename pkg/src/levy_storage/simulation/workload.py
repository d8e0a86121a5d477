"""workload.py: Event-driven simulation of the workload V(.) of a storage system with compound Poisson input and unit
drain, reflected at 0.

Paths are exact: jump epochs and sizes are drawn once and the workload at any time follows by replaying them. Nothing
is discretised in time, so an empty system reads as the exact value 0.0.
"""

import math
from typing import Iterator, Literal

import numpy as np

from ..levy.exponent import mean_input_rate
from ..levy.measure import quantile_function
from ..logger import get_logger
from ..schema.exceptions import DomainError, SimulationLimitError, StationarySamplerUnavailableError, \
    UnstableModelError
from ..schema.path_types import GRID_SLACK, GridObservations, WorkloadPath, grid_size
from ..schema.subordinator_types import CompoundPoisson, DeterministicJobs, ExponentialJobs, JobDistribution, \
    TabulatedJobs

DEFAULT_MAX_EVENTS = 50_000_000
# Warm-up length in units of the relaxation time 1 / phi'(0)
BURN_IN_RELAXATION_TIMES = 50.0

InitMode = Literal["stationary", "burn-in", "fixed"]


def sample_jobs(jobs: JobDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` i.i.d. job sizes."""
    match jobs:
        case ExponentialJobs(rate=rate):
            return rng.exponential(1.0 / rate, size)
        case DeterministicJobs(size=job_size):
            return np.full(size, job_size)
        case TabulatedJobs():
            return np.asarray(quantile_function(jobs)(rng.random(size)), dtype=float).reshape(-1)
    raise DomainError(f"Unknown job distribution kind '{jobs.kind}'")


def _merge_coincident(times: np.ndarray, sizes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jumps that share an epoch after rounding become one jump of the summed size."""
    if times.size < 2 or np.all(np.diff(times) > 0.0):
        return times, sizes
    unique_times, inverse = np.unique(times, return_inverse=True)
    return unique_times, np.bincount(inverse, weights=sizes)


def simulate_path(cp: CompoundPoisson, horizon: float, v0: float, rng: np.random.Generator,
                  max_events: int = DEFAULT_MAX_EVENTS) -> WorkloadPath:
    """Simulates the workload on [0, horizon] started from v0.

    The event count is Poisson(rate * horizon); given the count, the epochs are i.i.d. uniform on (0, horizon].

    Raises:
        - DomainError:          If horizon is not positive or v0 is negative.
        - SimulationLimitError: If the expected event count exceeds `max_events`.
    """
    log = get_logger()

    if not horizon > 0.0 or v0 < 0.0:
        raise DomainError(f"horizon must be positive and v0 nonnegative, got horizon={horizon}, v0={v0}")

    expected = cp.rate * horizon
    if expected > max_events:
        log.error(f"Expected {expected:.4g} events exceed the limit of {max_events}.")
        raise SimulationLimitError(f"Expected event count {expected:.4g} exceeds max-events {max_events}")

    count = int(rng.poisson(expected))
    times = np.sort(horizon * (1.0 - rng.random(count)))
    sizes = sample_jobs(cp.jobs, rng, count)
    times, sizes = _merge_coincident(times, sizes)

    log.debug(f"Simulated {count} events on [0, {horizon}] from v0={v0}.")
    return WorkloadPath(v0=v0, event_times=times, jump_sizes=sizes, horizon=horizon)


def workload_at(path: WorkloadPath, t):
    """V(t) for a time or an array of times in [0, T]; càdlàg, so V at a jump epoch includes the jump.

    Raises:
        - DomainError: If any t lies outside [0, T].
    """
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0) or np.any(ts > path.horizon * (1.0 + GRID_SLACK)):
        raise DomainError(f"t must lie in [0, {path.horizon}]")

    last = np.searchsorted(path.event_times, ts, side="right") - 1
    started = last >= 0
    safe = np.where(started, last, 0)
    level = np.where(started, path.post_jump[safe] if path.event_count else path.v0, path.v0)
    since = np.where(started, path.event_times[safe] if path.event_count else 0.0, 0.0)
    values = np.maximum(level - (ts - since), 0.0)
    return values if values.ndim else float(values)


def sample_grid(path: WorkloadPath, delta: float) -> GridObservations:
    """The observations V(i delta), i = 0..floor(T / delta); grid times are i * delta, never accumulated sums."""
    if not 0.0 < delta <= path.horizon * (1.0 + GRID_SLACK):
        raise DomainError(f"delta must lie in (0, {path.horizon}], got {delta}")
    m = grid_size(path.horizon, delta)
    times = np.minimum(np.arange(m + 1) * delta, path.horizon)
    return GridObservations(delta=delta, horizon=path.horizon, values=workload_at(path, times))


def stationary_init(cp: CompoundPoisson, rng: np.random.Generator) -> float:
    """A draw from the stationary workload law of a compound Poisson input with exponential jobs.

    With probability 1 - rho the system is empty; otherwise the workload is a Geometric(1 - rho) sum of Exp(eta)
    variables, where eta is the job rate and rho = rate / eta.

    Raises:
        - StationarySamplerUnavailableError: If the jobs are not exponential.
        - UnstableModelError:                If rho >= 1.
    """
    if not isinstance(cp.jobs, ExponentialJobs):
        raise StationarySamplerUnavailableError(
            f"No exact stationary sampler for '{cp.jobs.kind}' jobs; use init 'burn-in'")
    eta = cp.jobs.rate
    rho = cp.rate / eta
    if not rho < 1.0:
        raise UnstableModelError(f"Load rho = {rho:.6g} is not below 1")
    if rng.random() >= rho:
        return 0.0
    return float(rng.gamma(rng.geometric(1.0 - rho), 1.0 / eta))


def default_burn_in_time(cp: CompoundPoisson) -> float:
    """50 / phi'(0) with phi'(0) = 1 - E J(1)."""
    return BURN_IN_RELAXATION_TIMES / (1.0 - mean_input_rate(cp))


def burn_in(cp: CompoundPoisson, rng: np.random.Generator, burn_in_time: float | None = None,
            max_events: int = DEFAULT_MAX_EVENTS) -> float:
    """Approximately stationary start: the workload after `burn_in_time` (default 50 / phi'(0)) from empty."""
    warm_up = burn_in_time if burn_in_time is not None else default_burn_in_time(cp)
    path = simulate_path(cp, warm_up, 0.0, rng, max_events)
    return float(workload_at(path, warm_up))


def initial_workload(cp: CompoundPoisson, init: InitMode, v0: float, rng: np.random.Generator,
                     burn_in_time: float | None = None, max_events: int = DEFAULT_MAX_EVENTS) -> float:
    """V(0) for the start mode `init`: a stationary draw, the end of a burn-in run, or the fixed v0."""
    match init:
        case "stationary":
            return stationary_init(cp, rng)
        case "burn-in":
            return burn_in(cp, rng, burn_in_time, max_events)
        case "fixed":
            if v0 < 0.0:
                raise DomainError(f"v0 must be nonnegative, got {v0}")
            return v0
    raise DomainError(f"Unknown init mode '{init}'")


def poisson_epochs(xi: float, limit: float, rng: np.random.Generator) -> np.ndarray:
    """Epochs S_1 < S_2 < ... <= limit of a rate-xi Poisson process, drawn as partial sums of Exp(xi) gaps."""
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    mean_count = xi * limit
    chunk = int(mean_count + 4.0 * math.sqrt(mean_count) + 16)
    pieces = []
    last = 0.0
    while True:
        epochs = last + np.cumsum(rng.exponential(1.0 / xi, chunk))
        cut = int(np.searchsorted(epochs, limit, side="right"))
        pieces.append(epochs[:cut])
        if cut < chunk:
            return np.concatenate(pieces)
        last = epochs[-1]


def exact_probe_values(path: WorkloadPath, xi: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Workload at the exact epochs of a rate-xi Poisson process on [0, T].

    Returns:
        (epochs, values) with values[0] = V(0) and values[i] = V(S_i) for i = 1..n.
    """
    epochs = poisson_epochs(xi, path.horizon, rng)
    values = np.concatenate(([path.v0], np.atleast_1d(workload_at(path, epochs))))
    return epochs, values


def grid_to_rows(grid: GridObservations) -> Iterator[dict[str, str]]:
    """CSV rows `i,t,v` of a grid, floats at 17 significant digits."""
    for i, (t, v) in enumerate(zip(grid.times, grid.values)):
        yield {"i": str(i), "t": f"{t:.17g}", "v": f"{v:.17g}"}
