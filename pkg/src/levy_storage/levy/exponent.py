"""exponent.py: The Lévy exponent phi of the net input X(t) = J(t) - t and the functionals of the storage model
built from it: the inverse psi, stationary and transient Laplace-Stieltjes transforms, the emptiness probabilities,
the Blumenthal-Getoor index, the asymptotic variance of the moment estimator, and the grid-width rules.

All functions are pure; a NetInputModel is immutable and checked for stability when it is built.
"""

import math

from pydantic import BaseModel, ConfigDict, model_validator
from scipy import integrate, optimize

from .measure import laplace_exponent_quadrature, levy_density_of, quantile_function, truncated_mean
from ..schema.exceptions import DomainError, NumericalError, SingularityError, UnstableModelError
from ..schema.subordinator_types import (CompoundPoisson, DeterministicJobs, ExponentialJobs, GammaSubordinator,
                                         InverseGaussianSubordinator, JobDistribution, SubordinatorSpec,
                                         SumSubordinator, TabulatedJobs, TruncatedCP)

# Smallest alpha accepted by the asymptotic variance
MIN_VARIANCE_ALPHA = 1e-6
# Relative width of |xi - phi(alpha)| below which transient_lst refuses to evaluate
SINGULARITY_GUARD = 1e-8
_PSI_BRACKET_GUARD = 1e15
_PSI_RTOL = 1e-15


def mean_input_rate(spec: SubordinatorSpec) -> float:
    """E J(1), the mean input per unit time."""
    match spec:
        case GammaSubordinator(shape=shape, rate=rate):
            return shape / rate
        case InverseGaussianSubordinator(mean=mean):
            return mean
        case CompoundPoisson(rate=rate, jobs=jobs):
            return rate * _mean_job(jobs)
        case TruncatedCP(base=base, epsilon=epsilon):
            return truncated_mean(levy_density_of(base), epsilon)
        case SumSubordinator(components=components):
            return sum(mean_input_rate(c) for c in components)
    raise DomainError(f"Unknown subordinator kind '{spec.kind}'")


def _mean_job(jobs: JobDistribution) -> float:
    match jobs:
        case ExponentialJobs(rate=rate):
            return 1.0 / rate
        case DeterministicJobs(size=size):
            return size
        case TabulatedJobs():
            quantile = quantile_function(jobs)
            return _integrate_unit(quantile, jobs, "mean tabulated job size")
    raise DomainError(f"Unknown job distribution kind '{jobs.kind}'")


def _job_transform(jobs: JobDistribution, alpha: float) -> float:
    """E exp(-alpha B) of one job."""
    match jobs:
        case ExponentialJobs(rate=rate):
            return rate / (rate + alpha)
        case DeterministicJobs(size=size):
            return math.exp(-alpha * size)
        case TabulatedJobs():
            quantile = quantile_function(jobs)
            return _integrate_unit(lambda u: math.exp(-alpha * quantile(u)), jobs, "tabulated job transform")
    raise DomainError(f"Unknown job distribution kind '{jobs.kind}'")


def _integrate_unit(func, jobs: TabulatedJobs, what: str) -> float:
    """Integral of func(u) over [0, 1], split at the table knots."""
    knots = jobs.probabilities[1:-1]
    value, abserr = integrate.quad(func, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=50 + 4 * len(knots),
                                   points=knots or None)
    if abserr > 1e-8 * max(1.0, abs(value)):
        raise NumericalError(f"Quadrature of {what} did not converge", diagnostics={"achieved_abserr": abserr})
    return value


def input_exponent(spec: SubordinatorSpec, alpha: float) -> float:
    """log E exp(-alpha J(1)), the (nonpositive) Lévy exponent of the input alone."""
    if alpha == 0.0:
        return 0.0
    match spec:
        case GammaSubordinator(shape=shape, rate=rate):
            return -shape * math.log1p(alpha / rate)
        case InverseGaussianSubordinator(mean=mean, shape=shape):
            return (shape / mean) * (1.0 - math.sqrt(1.0 + 2.0 * mean ** 2 * alpha / shape))
        case CompoundPoisson(rate=rate, jobs=ExponentialJobs(rate=eta)):
            return -rate * alpha / (eta + alpha)
        case CompoundPoisson(rate=rate, jobs=jobs):
            return -rate * (1.0 - _job_transform(jobs, alpha))
        case TruncatedCP(base=base, epsilon=epsilon):
            return -laplace_exponent_quadrature(levy_density_of(base), alpha, epsilon)
        case SumSubordinator(components=components):
            return sum(input_exponent(c, alpha) for c in components)
    raise DomainError(f"Unknown subordinator kind '{spec.kind}'")


def has_closed_form(spec: SubordinatorSpec) -> bool:
    """Whether phi of `spec` is evaluated without quadrature."""
    match spec:
        case GammaSubordinator() | InverseGaussianSubordinator():
            return True
        case CompoundPoisson(jobs=ExponentialJobs() | DeterministicJobs()):
            return True
        case SumSubordinator(components=components):
            return all(has_closed_form(c) for c in components)
    return False


class NetInputModel(BaseModel):
    """Net input X(t) = J(t) - t of a storage system with unit-rate linear output.

    Properties:
        - input: The subordinator J(.).

    The model is stable: E J(1) < 1, checked on construction.
    """
    model_config = ConfigDict(frozen=True)

    input: SubordinatorSpec

    @model_validator(mode="after")
    def _check_stability(self) -> "NetInputModel":
        rate = mean_input_rate(self.input)
        if not rate < 1.0:
            raise UnstableModelError(f"Mean input rate E J(1) = {rate:.6g} is not below the unit output rate")
        return self

    @property
    def output_rate(self) -> float:
        return 1.0


def phi(model: NetInputModel, alpha: float) -> float:
    """phi(alpha) = log E exp(-alpha X(1)) = alpha - integral of (1 - exp(-alpha x)) nu(dx)."""
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0.0:
        return 0.0
    return alpha + input_exponent(model.input, alpha)


def phi_derivative_at_zero(model: NetInputModel) -> float:
    """phi'(0) = 1 - E J(1)."""
    return 1.0 - mean_input_rate(model.input)


def psi(model: NetInputModel, xi: float) -> float:
    """The inverse of phi: the unique alpha > 0 with phi(alpha) = xi.

    The bracket [0, hi] doubles hi from 1 until phi(hi) > xi, then bisection narrows it to a relative width of 1e-15.

    Raises:
        - DomainError:    If xi is not positive.
        - NumericalError: If the bracket passes the overflow guard.
    """
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")

    hi = 1.0
    while phi(model, hi) <= xi:
        hi *= 2.0
        if hi > _PSI_BRACKET_GUARD:
            raise NumericalError("psi bracket expansion exceeded the overflow guard", diagnostics={"xi": xi, "hi": hi})

    return optimize.bisect(lambda a: phi(model, a) - xi, 0.0, hi, xtol=1e-300, rtol=_PSI_RTOL, maxiter=2000)


def stationary_lst(model: NetInputModel, alpha: float) -> float:
    """E exp(-alpha V(inf)) = alpha phi'(0) / phi(alpha), the generalised Pollaczek-Khintchine formula."""
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0.0:
        return 1.0
    return alpha * phi_derivative_at_zero(model) / phi(model, alpha)


def stationary_atom(model: NetInputModel) -> float:
    """pi({0}) = phi'(0), the long-run probability of an empty system."""
    return phi_derivative_at_zero(model)


def transient_lst(model: NetInputModel, alpha: float, x: float, xi: float) -> float:
    """E_x exp(-alpha V(T)) for T ~ Exp(xi) independent of the input and V(0) = x.

    Raises:
        - SingularityError: If xi is within 1e-8 max(1, xi) of phi(alpha); perturb alpha and retry.
    """
    if alpha < 0.0 or x < 0.0:
        raise DomainError(f"alpha and x must be nonnegative, got alpha={alpha}, x={x}")
    phi_alpha = phi(model, alpha)
    if abs(xi - phi_alpha) <= SINGULARITY_GUARD * max(1.0, xi):
        raise SingularityError(f"xi={xi} coincides with phi(alpha)={phi_alpha}; perturb alpha")
    root = psi(model, xi)
    return xi / (xi - phi_alpha) * (math.exp(-alpha * x) - alpha / root * math.exp(-root * x))


def zero_prob(model: NetInputModel, x: float, xi: float) -> float:
    """P_x(V(T) = 0) = (xi / psi(xi)) exp(-psi(xi) x) for T ~ Exp(xi)."""
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x}")
    root = psi(model, xi)
    return xi / root * math.exp(-root * x)


def bg_index(spec: SubordinatorSpec) -> float:
    """Blumenthal-Getoor index of the input."""
    match spec:
        case InverseGaussianSubordinator():
            return 0.5
        case SumSubordinator(components=components):
            return max(bg_index(c) for c in components)
    return 0.0


class GammaRange(BaseModel):
    """Open interval (lower, upper) of admissible grid exponents gamma for Delta = n^-gamma."""
    lower: float
    upper: float = 1.0
    empty: bool


def clt_gamma_range(beta: float) -> GammaRange:
    """(1 / (2 - 2 sqrt(beta)), 1), flagged empty once the lower bound reaches 1 (beta >= 1/4)."""
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    denominator = 2.0 - 2.0 * math.sqrt(beta)
    lower = math.inf if denominator == 0.0 else 1.0 / denominator
    return GammaRange(lower=lower, empty=lower >= 1.0)


def delta_for_exponent(xi: float, horizon: float, gamma: float) -> float:
    """Delta = (xi T)^-gamma: the high-frequency rule Delta = n^-gamma with n ~ xi T probes."""
    if not xi * horizon > 1.0:
        raise DomainError(f"xi * T must exceed 1, got {xi * horizon}")
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return (xi * horizon) ** -gamma


def suggest_delta(xi: float, horizon: float, beta: float) -> float:
    """Grid width (xi T)^(-1 / (2 - 2 sqrt(beta))) at the lower end of the admissible exponent range.

    For beta >= 1/4 the range is empty; the rule is still applied as stated, beyond the hypothesis of the CLT.
    """
    gamma_range = clt_gamma_range(beta)
    if math.isinf(gamma_range.lower):
        raise DomainError("beta = 1 leaves no finite grid exponent")
    return delta_for_exponent(xi, horizon, gamma_range.lower)


def variance_formula(phi_alpha: float, phi_two_alpha: float, phi_prime_zero: float, alpha: float,
                     xi: float) -> float:
    """The asymptotic variance expression evaluated on given values of phi(alpha), phi(2 alpha) and phi'(0)."""
    ratio = 2.0 * phi_alpha / phi_two_alpha
    return phi_alpha ** 2 / (alpha * phi_prime_zero) \
        * (alpha + 2.0 * xi * (1.0 - ratio) + ratio * (phi_alpha - phi_two_alpha))


def asymptotic_variance(model: NetInputModel, alpha: float, xi: float) -> float:
    """sigma^2 of sqrt(n) (phi_hat(alpha) - phi(alpha)) under stationary high-frequency sampling."""
    if alpha < MIN_VARIANCE_ALPHA:
        raise DomainError(f"alpha must be at least {MIN_VARIANCE_ALPHA}, got {alpha}")
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    return variance_formula(phi(model, alpha), phi(model, 2.0 * alpha), phi_derivative_at_zero(model), alpha, xi)
