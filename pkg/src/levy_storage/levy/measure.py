"""measure.py: Lévy densities of infinite-activity subordinators, their truncation at a small jump size, and the
compound Poisson surrogate that keeps only the jumps above the truncation level.

Integrals of the density are adaptive quadratures. Below x = 1 they run in the variable t = log(x), which turns the
x^-1 and x^-3/2 blow-ups at the origin into smooth, exponentially decaying integrands.
"""

import math
from functools import lru_cache
from typing import Annotated, Callable, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from ..logger import get_logger
from ..schema.exceptions import DomainError, ModelSpecError, NumericalError, UnsupportedModelError
from ..schema.subordinator_types import (CompoundPoisson, GammaSubordinator, InverseGaussianSubordinator,
                                         SubordinatorSpec, SumSubordinator, TabulatedJobs, TruncatedCP)

DEFAULT_EPSILON = 1e-5
DEFAULT_TABLE_SIZE = 2048
MIN_TABLE_SIZE = 256

# Mass left beyond the table, relative to the truncated rate
_TAIL_CUTOFF = 1e-12
_X_MAX_GUARD = 1e12

_EPSABS = 1e-15
_EPSREL = 1e-11
# Accepted when QUADPACK reports trouble but still meets this relative error
_ACCEPTED_RELERR = 1e-9
_LIMIT = 500
_LOG_SPLIT = 1.0


class GammaTerm(BaseModel):
    """Gamma Lévy density term: shape * x^-1 * exp(-rate * x)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["gamma"] = "gamma"
    shape: PositiveFloat
    rate: PositiveFloat

    def x_density(self, x: float) -> float:
        """x * density(x), finite at the origin."""
        return self.shape * math.exp(-self.rate * x)


class InverseGaussianTerm(BaseModel):
    """Inverse Gaussian Lévy density term: sqrt(shape / 2 pi) * x^-3/2 * exp(-shape * x / (2 mean^2))."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["inverse-gaussian"] = "inverse-gaussian"
    mean: PositiveFloat
    shape: PositiveFloat

    def x_density(self, x: float) -> float:
        """x * density(x); diverges like x^-1/2 at the origin."""
        if x <= 0.0:
            return math.inf
        return math.sqrt(self.shape / (2.0 * math.pi * x)) * math.exp(-self.shape * x / (2.0 * self.mean ** 2))


DensityTerm = Annotated[Union[GammaTerm, InverseGaussianTerm], Field(discriminator="kind")]


class LevyDensity(BaseModel):
    """Lévy density given as a sum of closed-form terms."""
    model_config = ConfigDict(frozen=True)

    terms: tuple[DensityTerm, ...] = Field(min_length=1)

    def x_density(self, x: float) -> float:
        return sum(term.x_density(x) for term in self.terms)

    def __call__(self, x):
        """Density at x (scalar or array), x > 0."""
        xs = np.asarray(x, dtype=float)
        values = np.zeros_like(xs)
        with np.errstate(divide="ignore", over="ignore"):
            for term in self.terms:
                if isinstance(term, GammaTerm):
                    values = values + term.shape * np.exp(-term.rate * xs) / xs
                else:
                    values = values + np.sqrt(term.shape / (2.0 * np.pi)) * xs ** -1.5 \
                             * np.exp(-term.shape * xs / (2.0 * term.mean ** 2))
        return values if values.ndim else float(values)


class TruncatedCPSpec(BaseModel):
    """Compound Poisson surrogate of a Lévy density truncated at epsilon.

    Properties:
        - epsilon:                Truncation level; only jumps larger than it are kept.
        - rate:                   r_eps = nu(eps, inf), the jump rate of the surrogate.
        - truncated_mean:         Integral of x nu(dx) over (eps, inf), the mean input per unit time.
        - probabilities:          Normalised CDF r_eps^-1 nu(eps, x] at the table knots, from 0 to 1.
        - quantiles:              Knot positions, log-spaced from eps to x_max, strictly increasing.
        - tail_mass_beyond_table: nu(x_max, inf) / r_eps, the mass the table ignores.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: PositiveFloat
    rate: PositiveFloat
    truncated_mean: PositiveFloat
    probabilities: np.ndarray
    quantiles: np.ndarray
    tail_mass_beyond_table: float = Field(ge=0.0, le=_TAIL_CUTOFF)

    @field_validator("probabilities", "quantiles", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float)

    @field_validator("quantiles", mode="after")
    @classmethod
    def _strictly_increasing(cls, value: np.ndarray) -> np.ndarray:
        if value.size < 2 or np.any(np.diff(value) <= 0.0):
            raise ValueError("table quantiles must be strictly increasing")
        return value

    @property
    def x_max(self) -> float:
        return float(self.quantiles[-1])

    def to_compound_poisson(self) -> CompoundPoisson:
        """The surrogate as a simulable compound Poisson spec with tabulated jobs."""
        return CompoundPoisson(rate=self.rate,
                               jobs=TabulatedJobs(probabilities=tuple(self.probabilities.tolist()),
                                                  quantiles=tuple(self.quantiles.tolist())))

    def inverse_cdf(self, u):
        return _table_quantile(tuple(self.probabilities.tolist()), tuple(self.quantiles.tolist()))(u)

    def cdf(self, x):
        """Tabulated CDF of the jump sizes; 0 below epsilon, 1 above x_max."""
        xs = np.asarray(x, dtype=float)
        log_cdf = PchipInterpolator(np.log(self.quantiles), self.probabilities)
        values = np.clip(log_cdf(np.log(np.clip(xs, self.quantiles[0], self.quantiles[-1]))), 0.0, 1.0)
        return values if values.ndim else float(values)

    def sample_jobs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.inverse_cdf(rng.random(size))


@lru_cache(maxsize=64)
def _table_quantile(probabilities: tuple[float, ...], quantiles: tuple[float, ...]) -> Callable:
    p = np.asarray(probabilities, dtype=float)
    log_q = np.log(np.asarray(quantiles, dtype=float))
    interpolator = PchipInterpolator(p, log_q)

    def quantile(u):
        values = np.exp(interpolator(np.clip(u, 0.0, 1.0)))
        return values if np.ndim(values) else float(values)

    return quantile


def quantile_function(jobs: TabulatedJobs) -> Callable:
    """Monotone inverse CDF u -> job size of a tabulated job distribution (PCHIP in log-size)."""
    return _table_quantile(jobs.probabilities, jobs.quantiles)


def _quad(func: Callable[[float], float], lo: float, hi: float, what: str) -> tuple[float, float]:
    result = integrate.quad(func, lo, hi, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > max(_EPSABS, _ACCEPTED_RELERR * abs(value)):
        log = get_logger()
        log.error(f"Quadrature of {what} on [{lo}, {hi}] did not converge: {result[3]}.")
        raise NumericalError(f"Quadrature of {what} did not converge",
                             diagnostics={"interval": (lo, hi), "value": value, "achieved_abserr": abserr,
                                          "requested_relerr": _EPSREL})
    return value, abserr


def _integrate_density(density: LevyDensity, weight: Callable[[float], float], lo: float, hi: float,
                       what: str) -> float:
    """Integral of weight(x) * nu(dx) over (lo, hi], log-substituted below x = 1."""
    total = 0.0
    if lo < _LOG_SPLIT:
        t_lo = -math.inf if lo <= 0.0 else math.log(lo)
        t_hi = math.log(min(hi, _LOG_SPLIT))

        def in_log(t: float) -> float:
            x = math.exp(t)
            if x == 0.0:
                return 0.0
            w = weight(x)
            return 0.0 if w == 0.0 else w * density.x_density(x)

        total += _quad(in_log, t_lo, t_hi, what)[0]
    if hi > _LOG_SPLIT:
        def direct(x: float) -> float:
            return weight(x) * density.x_density(x) / x

        total += _quad(direct, max(lo, _LOG_SPLIT), hi, what)[0]
    return total


def _one(_: float) -> float:
    return 1.0


def _identity(x: float) -> float:
    return x


def truncated_rate(density: LevyDensity, epsilon: float) -> float:
    """r_eps = nu(eps, inf), the rate of jumps larger than epsilon."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return _integrate_density(density, _one, epsilon, math.inf, "truncated rate")


def truncated_mean(density: LevyDensity, epsilon: float) -> float:
    """Integral of x nu(dx) over (eps, inf): E J_eps(1), the mean input rate of the truncated process."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return _integrate_density(density, _identity, epsilon, math.inf, "truncated mean")


def tail_mass(density: LevyDensity, x: float) -> float:
    """nu(x, inf)."""
    return _integrate_density(density, _one, x, math.inf, "tail mass")


def laplace_exponent_quadrature(density: LevyDensity, alpha: float, epsilon: float = 0.0) -> float:
    """Integral of (1 - exp(-alpha x)) nu(dx) over (eps, inf); eps = 0 gives the full integral."""
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0.0:
        return 0.0

    def weight(x: float) -> float:
        return -math.expm1(-alpha * x)

    return _integrate_density(density, weight, epsilon, math.inf, f"Lévy exponent at alpha={alpha}")


def levy_density_of(spec: SubordinatorSpec) -> LevyDensity:
    """The closed-form Lévy density of a Gamma, inverse Gaussian, or sum-of-those spec."""
    match spec:
        case GammaSubordinator(shape=shape, rate=rate):
            return LevyDensity(terms=(GammaTerm(shape=shape, rate=rate),))
        case InverseGaussianSubordinator(mean=mean, shape=shape):
            return LevyDensity(terms=(InverseGaussianTerm(mean=mean, shape=shape),))
        case SumSubordinator(components=components):
            return LevyDensity(terms=tuple(term for c in components for term in levy_density_of(c).terms))
        case _:
            raise ModelSpecError(f"No closed-form Lévy density for kind '{spec.kind}'")


def build_truncated_cp(density: LevyDensity, epsilon: float = DEFAULT_EPSILON,
                       table_size: int = DEFAULT_TABLE_SIZE) -> TruncatedCPSpec:
    """Tabulates the jump-size law of the density truncated at epsilon.

    The table runs on a log-spaced grid from epsilon to the first doubling point x_max whose tail mass falls below
    1e-12 r_eps.

    Raises:
        - DomainError:    If epsilon is not positive or the table is smaller than 256 knots.
        - NumericalError: If a quadrature fails, the density has no mass above epsilon, or no cutoff is found.
    """

    log = get_logger()

    if table_size < MIN_TABLE_SIZE:
        raise DomainError(f"table_size must be at least {MIN_TABLE_SIZE}, got {table_size}")

    rate = truncated_rate(density, epsilon)
    if not rate > 0.0:
        raise NumericalError("No Lévy mass above the truncation level", diagnostics={"epsilon": epsilon})

    cutoff = _TAIL_CUTOFF * rate
    x_max = max(2.0 * epsilon, 1.0)
    tail = tail_mass(density, x_max)
    while tail >= cutoff:
        x_max *= 2.0
        if x_max > _X_MAX_GUARD:
            raise NumericalError("Tail cutoff not found below the overflow guard",
                                 diagnostics={"x_max": x_max, "tail": tail, "cutoff": cutoff})
        tail = tail_mass(density, x_max)

    knots = np.geomspace(epsilon, x_max, table_size)
    masses = np.array([_integrate_density(density, _one, a, b, "table segment")
                       for a, b in zip(knots[:-1], knots[1:])])
    cumulative = np.concatenate(([0.0], np.cumsum(masses)))
    probabilities = cumulative / cumulative[-1]

    keep = np.concatenate(([True], np.diff(probabilities) > 0.0))
    probabilities, knots = probabilities[keep], knots[keep]
    probabilities[-1] = 1.0

    mean = truncated_mean(density, epsilon)
    log.info(f"Truncated compound Poisson at eps={epsilon}: rate={rate:.10g}, mean={mean:.10g}, "
             f"x_max={x_max:g}, knots={knots.size}, tail mass={tail / rate:.3g}.")

    return TruncatedCPSpec(epsilon=epsilon, rate=rate, truncated_mean=mean, probabilities=probabilities,
                           quantiles=knots, tail_mass_beyond_table=tail / rate)


def resolve_compound_poisson(spec: SubordinatorSpec, epsilon: float = DEFAULT_EPSILON,
                             table_size: int = DEFAULT_TABLE_SIZE) -> CompoundPoisson:
    """The simulable compound Poisson process standing in for `spec`.

    Compound Poisson specs are returned as they are; truncated specs are built from their base at their own epsilon;
    Gamma, inverse Gaussian and their sums are truncated at `epsilon`.

    Raises:
        - UnsupportedModelError: If `spec` mixes compound Poisson and infinite-activity components.
    """
    match spec:
        case CompoundPoisson():
            return spec
        case TruncatedCP(base=base, epsilon=eps):
            return build_truncated_cp(levy_density_of(base), eps, table_size).to_compound_poisson()
        case GammaSubordinator() | InverseGaussianSubordinator():
            return build_truncated_cp(levy_density_of(spec), epsilon, table_size).to_compound_poisson()
        case SumSubordinator(components=components):
            if any(isinstance(c, (CompoundPoisson, TruncatedCP)) for c in components):
                raise UnsupportedModelError("Sums containing compound Poisson components cannot be simulated")
            return build_truncated_cp(levy_density_of(spec), epsilon, table_size).to_compound_poisson()
    raise UnsupportedModelError(f"Cannot simulate kind '{spec.kind}'")
