"""probing.py: Poisson probing of grid observations and the moment estimator of the Lévy exponent.

Probe epochs S_1 < S_2 < ... of a rate-xi Poisson process are rounded to the nearest grid point (ties up), and the
workload values seen there enter the moment equation

    phi_hat(alpha) = [xi / n (exp(-alpha V_n) - exp(-alpha V_0)) + alpha / n #{i : V_i = 0}] / [1/n sum exp(-alpha V_i)]

with sums over i = 1..n.
"""

import math
from typing import Sequence

import numpy as np
from scipy.stats import norm

from ..levy.exponent import variance_formula
from ..logger import get_logger
from ..schema.estimate_types import ConfidenceInterval, Estimate, ProbeSample, ResampleCurve, ResampleEstimate
from ..schema.exceptions import DomainError, EmptyProbeSampleError, NumericalError, VarianceUnavailableError
from ..schema.path_types import GridObservations, grid_size
from ..simulation.workload import poisson_epochs

DEFAULT_LEVEL = 0.95
MAX_REDRAWS = 100
DEFAULT_RESAMPLE_CANDIDATES = (1, 10, 100, 1000)


def round_to_grid(probe_times, delta: float) -> np.ndarray:
    """Nearest grid index floor(S / delta + 1/2), rounding half up."""
    return np.floor(np.asarray(probe_times, dtype=float) / delta + 0.5).astype(np.int64)


def draw_probes(grid: GridObservations, horizon: float, xi: float, rng: np.random.Generator,
                n: int | None = None) -> ProbeSample:
    """Draws Poisson probes on [0, T] and reads the grid at their rounded epochs.

    In the default mode probes are drawn until the first one that rounds beyond T, which is discarded. With `n` set,
    exactly n probes are drawn.

    Raises:
        - DomainError:           If the grid does not cover [0, T], or a fixed-n sample runs beyond T.
        - EmptyProbeSampleError: If no probe lands in [0, T].
    """
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    m = grid_size(horizon, grid.delta)
    if m > grid.m:
        raise DomainError(f"grid covers [0, {grid.horizon}] but the horizon is {horizon}")

    if n is None:
        epochs = poisson_epochs(xi, (m + 0.5) * grid.delta, rng)
    else:
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        epochs = np.cumsum(rng.exponential(1.0 / xi, n))

    indices = round_to_grid(epochs, grid.delta)
    inside = int(np.searchsorted(indices, m, side="right"))
    if n is not None and inside < n:
        raise DomainError(f"the {n}-th probe rounds beyond the horizon {horizon}")
    if inside == 0:
        raise EmptyProbeSampleError(f"No probe landed in [0, {horizon}] at rate {xi}")

    epochs, indices = epochs[:inside], indices[:inside]
    values = np.concatenate(([grid.values[0]], grid.values[indices]))
    return ProbeSample(xi=xi, delta=grid.delta, horizon=horizon, probe_times=epochs, rounded_indices=indices,
                       values=values)


def _zeros(observed: np.ndarray, zero_tolerance: float) -> np.ndarray:
    return observed == 0.0 if zero_tolerance == 0.0 else observed <= zero_tolerance


def _moment_estimate(values: np.ndarray, xi: float, alpha: float, zero_tolerance: float) -> Estimate:
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    observed = values[1:]
    n = observed.size
    if n < 1:
        raise EmptyProbeSampleError("The estimator needs at least one probe")

    zero_fraction = float(np.mean(_zeros(observed, zero_tolerance)))
    lst_mean = float(np.mean(np.exp(-alpha * observed)))
    if lst_mean == 0.0:
        raise NumericalError("Laplace transform mean underflowed to 0", diagnostics={"alpha": alpha, "n": n})

    endpoint = xi / n * (math.exp(-alpha * values[-1]) - math.exp(-alpha * values[0]))
    phi_hat = (endpoint + alpha * zero_fraction) / lst_mean
    return Estimate(alpha=alpha, phi_hat=phi_hat, n=n, xi=xi, zero_fraction=zero_fraction, lst_mean=lst_mean,
                    v_first=float(values[0]), v_last=float(values[-1]))


def estimate_grid(sample: ProbeSample, alpha: float, zero_tolerance: float = 0.0) -> Estimate:
    """The grid estimator phi_hat_n^Delta(alpha) from rounded probes.

    Zeros are detected exactly unless `zero_tolerance` is positive, for data where an empty system may be recorded
    inexactly.
    """
    return _moment_estimate(sample.values, sample.xi, alpha, zero_tolerance)


def estimate_poisson(values, xi: float, alpha: float, zero_tolerance: float = 0.0) -> Estimate:
    """The estimator from workload values at exact probe epochs; values[0] = V(0)."""
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    return _moment_estimate(np.asarray(values, dtype=float).reshape(-1), xi, alpha, zero_tolerance)


def estimate_curve(sample: ProbeSample, alphas: Sequence[float], zero_tolerance: float = 0.0) -> np.ndarray:
    """phi_hat on a grid of alphas; alpha = 0 gives 0."""
    a = np.asarray(alphas, dtype=float).reshape(-1, 1)
    if np.any(a < 0.0):
        raise DomainError("alphas must be nonnegative")
    values = sample.values
    observed = values[1:]
    n = observed.size
    zero_fraction = np.mean(_zeros(observed, zero_tolerance))
    lst_mean = np.exp(-a * observed).mean(axis=1)
    endpoint = sample.xi / n * (np.exp(-a[:, 0] * values[-1]) - np.exp(-a[:, 0] * values[0]))
    return (endpoint + a[:, 0] * zero_fraction) / lst_mean


def residuals(sample: ProbeSample, alpha: float, phi_value: float, zero_tolerance: float = 0.0) -> np.ndarray:
    """Z_i = (xi - phi) exp(-alpha V_i) - xi exp(-alpha V_{i-1}) + alpha 1{V_i = 0}, i = 1..n.

    With phi_value = phi(alpha), sqrt(n) (phi_hat - phi) = (sum Z_i / sqrt(n)) / lst_mean.
    """
    transforms = np.exp(-alpha * sample.values)
    zeros = _zeros(sample.values[1:], zero_tolerance)
    return (sample.xi - phi_value) * transforms[1:] - sample.xi * transforms[:-1] + alpha * zeros


def plugin_variance(sample: ProbeSample, alpha: float, zero_tolerance: float = 0.0) -> float:
    """The asymptotic variance with phi(alpha), phi(2 alpha) and phi'(0) replaced by their estimates.

    phi'(0) is estimated by the zero fraction. A negative value, possible with noisy plug-ins, is clamped to 0.

    Raises:
        - VarianceUnavailableError: If no probe saw an empty system.
    """
    log = get_logger()

    single = estimate_grid(sample, alpha, zero_tolerance)
    if single.zero_fraction == 0.0:
        raise VarianceUnavailableError()
    double = estimate_grid(sample, 2.0 * alpha, zero_tolerance)
    if double.phi_hat == 0.0:
        raise VarianceUnavailableError(f"Estimate at 2 alpha = {2.0 * alpha} vanished; variance plug-in unavailable")

    variance = variance_formula(single.phi_hat, double.phi_hat, single.zero_fraction, alpha, sample.xi)
    if variance < 0.0:
        log.warning(f"Plug-in variance {variance:.6g} at alpha={alpha} is negative; clamped to 0.")
        return 0.0
    return variance


def normal_interval(phi_hat: float, sigma_sq: float, n: int, level: float = DEFAULT_LEVEL) -> ConfidenceInterval:
    """phi_hat +- z sqrt(sigma_sq / n), z the (1 + level) / 2 standard normal quantile."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    half_width = float(norm.ppf((1.0 + level) / 2.0)) * math.sqrt(sigma_sq / n)
    return ConfidenceInterval(lo=phi_hat - half_width, hi=phi_hat + half_width, level=level)


def confidence_interval(sample: ProbeSample, alpha: float, level: float = DEFAULT_LEVEL,
                        zero_tolerance: float = 0.0) -> ConfidenceInterval:
    """Symmetric CLT interval around phi_hat(alpha) with the plug-in variance."""
    variance = plugin_variance(sample, alpha, zero_tolerance)
    return normal_interval(estimate_grid(sample, alpha, zero_tolerance).phi_hat, variance, sample.n, level)


def estimate_with_interval(sample: ProbeSample, alpha: float, level: float = DEFAULT_LEVEL,
                           zero_tolerance: float = 0.0) -> Estimate:
    """Estimate with sigma_hat_sq and the interval filled in when the plug-in variance is available."""
    estimate = estimate_grid(sample, alpha, zero_tolerance)
    try:
        variance = plugin_variance(sample, alpha, zero_tolerance)
    except VarianceUnavailableError as e:
        get_logger().debug(f"No interval at alpha={alpha}: {e}")
        return estimate
    ci = normal_interval(estimate.phi_hat, variance, estimate.n, level)
    return estimate.model_copy(update={"sigma_hat_sq": variance, "ci": ci})


def _draw_nonempty(grid: GridObservations, horizon: float, xi: float, rng: np.random.Generator) -> ProbeSample:
    for _ in range(MAX_REDRAWS):
        try:
            return draw_probes(grid, horizon, xi, rng)
        except EmptyProbeSampleError:
            continue
    raise EmptyProbeSampleError(f"No probe landed in [0, {horizon}] in {MAX_REDRAWS} attempts")


def resample_estimate(grid: GridObservations, horizon: float, xi: float, K: int, alpha: float,
                      rng: np.random.Generator, zero_tolerance: float = 0.0) -> ResampleEstimate:
    """Average of K grid estimates on one fixed grid, each with its own probe draw.

    Empty probe draws are redrawn, at most 100 times per iteration.
    """
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    phi_hats, counts = np.empty(K), np.empty(K, dtype=np.int64)
    for k in range(K):
        sample = _draw_nonempty(grid, horizon, xi, rng)
        phi_hats[k] = estimate_grid(sample, alpha, zero_tolerance).phi_hat
        counts[k] = sample.n
    return ResampleEstimate(alpha=alpha, phi_hats=phi_hats, probe_counts=counts)


def resample_curve(grid: GridObservations, horizon: float, xi: float, K: int, alphas: Sequence[float],
                   rng: np.random.Generator, zero_tolerance: float = 0.0) -> ResampleCurve:
    """The resampling estimator on a grid of alphas; all alphas share each iteration's probe draw."""
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    alphas = np.asarray(alphas, dtype=float)
    phi_hats, counts = np.empty((K, alphas.size)), np.empty(K, dtype=np.int64)
    for k in range(K):
        sample = _draw_nonempty(grid, horizon, xi, rng)
        phi_hats[k] = estimate_curve(sample, alphas, zero_tolerance)
        counts[k] = sample.n
    return ResampleCurve(alphas=alphas, phi_hats=phi_hats, probe_counts=counts)


def choose_resample_size(grid: GridObservations, horizon: float, xi: float, alpha: float, rng: np.random.Generator,
                         tolerance: float, candidates: Sequence[int] = DEFAULT_RESAMPLE_CANDIDATES,
                         repeats: int = 5) -> int:
    """Smallest K whose resampling estimates, repeated `repeats` times, have a standard deviation within `tolerance`.

    Falls back to the largest candidate with a warning.
    """
    log = get_logger()

    if repeats < 2:
        raise DomainError(f"repeats must be at least 2, got {repeats}")
    ordered = sorted(candidates)
    for K in ordered:
        means = [resample_estimate(grid, horizon, xi, K, alpha, rng).mean_phi for _ in range(repeats)]
        spread = float(np.std(means, ddof=1))
        log.debug(f"Resampling with K={K}: standard deviation {spread:.4g} over {repeats} repeats.")
        if spread <= tolerance:
            return K
    log.warning(f"No K in {ordered} reached a standard deviation of {tolerance}; using K={ordered[-1]}.")
    return ordered[-1]
