"""service/common.py: Set-up shared by all commands: models, the simulated surrogate, grid width and start mode."""

from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..levy.exponent import (NetInputModel, bg_index, clt_gamma_range, delta_for_exponent, has_closed_form,
                             mean_input_rate, phi, phi_derivative_at_zero, suggest_delta)
from ..levy.measure import resolve_compound_poisson
from ..logger import get_logger
from ..properties import ExperimentConfig
from ..schema.exceptions import StationarySamplerUnavailableError
from ..schema.path_types import WorkloadPath
from ..schema.report_types import ReportRow
from ..schema.subordinator_types import CompoundPoisson, ExponentialJobs, TruncatedCP
from ..simulation.streams import INIT_STREAM, PATH_STREAM, make_stream
from ..simulation.workload import BURN_IN_RELAXATION_TIMES, initial_workload, simulate_path


class ExperimentSetup(BaseModel):
    """Everything a command derives from the config before simulating.

    Properties:
        - config:     The validated configuration.
        - model:      Net input with the configured input.
        - sim_model:  Net input with the simulated input (the truncated surrogate for infinite-activity inputs).
        - cp:         The compound Poisson process that is simulated.
        - init:       Start mode in effect.
    """
    model_config = ConfigDict(frozen=True)

    config: ExperimentConfig
    model: NetInputModel
    sim_model: NetInputModel
    cp: CompoundPoisson
    init: str

    @property
    def beta(self) -> float:
        return bg_index(self.model.input)

    @property
    def burn_in_time(self) -> float:
        if self.config.burn_in_time is not None:
            return self.config.burn_in_time
        return BURN_IN_RELAXATION_TIMES / phi_derivative_at_zero(self.sim_model)

    @property
    def truncation(self) -> TruncatedCP | None:
        """The truncated input that is simulated, None for a compound Poisson input."""
        return self.sim_model.input if isinstance(self.sim_model.input, TruncatedCP) else None

    def phi_true(self, alpha: float) -> float | None:
        """phi of the configured model; None when it needs quadrature (tabulated jobs)."""
        if not has_closed_form(self.model.input):
            return None
        return _cached_phi(self.model, float(alpha))

    def phi_sim(self, alpha: float) -> float:
        return _cached_phi(self.sim_model, float(alpha))


@lru_cache(maxsize=4096)
def _cached_phi(model: NetInputModel, alpha: float) -> float:
    return phi(model, alpha)


def has_stationary_sampler(cp: CompoundPoisson) -> bool:
    return isinstance(cp.jobs, ExponentialJobs)


def prepare(config: ExperimentConfig, require_stationary: bool = False) -> ExperimentSetup:
    """Builds the models and the simulated surrogate of `config`.

    A stationary start without an exact sampler falls back to burn-in with a warning, unless `require_stationary`.

    Raises:
        - UnstableModelError:                If the configured input has mean rate >= 1.
        - StationarySamplerUnavailableError: If `require_stationary` and the start cannot be drawn exactly.
    """
    log = get_logger()

    spec = config.model.to_spec()
    model = NetInputModel(input=spec)
    sim_spec = config.model.simulation_spec(config.epsilon)

    cp = resolve_compound_poisson(sim_spec, config.epsilon, config.table_size)
    if isinstance(sim_spec, TruncatedCP):
        sim_model = NetInputModel(input=sim_spec)
        log.info(f"Simulating the truncation at eps={sim_spec.epsilon}: r_eps={cp.rate:.10g}, "
                 f"drift={mean_input_rate(sim_spec) - 1.0:.10g}.")
    else:
        sim_model = model

    init = config.init
    if init == "stationary" and not has_stationary_sampler(cp):
        if require_stationary:
            log.error(f"No exact stationary sampler for '{cp.jobs.kind}' jobs.")
            raise StationarySamplerUnavailableError(
                f"No exact stationary sampler for '{cp.jobs.kind}' jobs; set init to 'burn-in' to run with an "
                f"approximately stationary start")
        log.warning(f"No exact stationary sampler for '{cp.jobs.kind}' jobs => using init 'burn-in'.")
        init = "burn-in"
    log.info(f"Initialisation mode set to: {init}.")

    return ExperimentSetup(config=config, model=model, sim_model=sim_model, cp=cp, init=init)


def resolve_delta(setup: ExperimentSetup, horizon: float, delta: float | str | None = None) -> float:
    """The grid width: a configured number, or for `auto` the rule (xi T)^-gamma.

    gamma is the configured grid exponent, or else the lower end 1 / (2 - 2 sqrt(beta)) of the admissible range.
    """
    log = get_logger()

    config = setup.config
    delta = config.delta if delta is None else delta
    if delta != "auto":
        return float(delta)

    gamma_range = clt_gamma_range(setup.beta)
    if config.grid_exponent is not None:
        chosen = delta_for_exponent(config.xi, horizon, config.grid_exponent)
        if not gamma_range.lower < config.grid_exponent < gamma_range.upper:
            log.warning(f"Grid exponent {config.grid_exponent} lies outside the admissible range "
                        f"({gamma_range.lower:.6g}, {gamma_range.upper}).")
    else:
        chosen = suggest_delta(config.xi, horizon, setup.beta)
        if gamma_range.empty:
            log.warning(f"Admissible grid exponent range is empty for beta={setup.beta}; "
                        f"using (xi T)^-{gamma_range.lower:.6g} as a heuristic.")
    log.info(f"Grid width (delta) set to: {chosen:.10g} for T={horizon}.")
    return chosen


def start_and_simulate(setup: ExperimentSetup, horizon: float, seed: int, replication: int) -> WorkloadPath:
    """Draws V(0) for the start mode and simulates [0, horizon] on the streams of `replication`."""
    config = setup.config
    v0 = initial_workload(setup.cp, setup.init, config.v0, make_stream(seed, replication, INIT_STREAM),
                          setup.burn_in_time, config.max_events)
    return simulate_path(setup.cp, horizon, v0, make_stream(seed, replication, PATH_STREAM), config.max_events)


def alpha_grid(alpha_max: float, alpha_step: float) -> np.ndarray:
    """0, step, 2 step, ..., alpha_max."""
    return np.linspace(0.0, alpha_max, int(round(alpha_max / alpha_step)) + 1)


def make_row(setup: ExperimentSetup, experiment_id: str, alpha: float, delta: float, horizon: float, n: int,
             phi_hat: float, seed: int, sigma_hat_sq: float | None = None, ci_lo: float | None = None,
             ci_hi: float | None = None) -> ReportRow:
    return ReportRow(experiment_id=experiment_id, alpha=alpha, delta=delta, xi=setup.config.xi, horizon=horizon, n=n,
                     phi_hat=phi_hat, sigma_hat_sq=sigma_hat_sq, ci_lo=ci_lo, ci_hi=ci_hi,
                     phi_true=setup.phi_true(alpha), phi_sim=setup.phi_sim(alpha), seed=seed)


def base_metadata(setup: ExperimentSetup, command: str) -> dict[str, str]:
    """Metadata common to every report."""
    config = setup.config
    metadata = {
        "command": command,
        "seed": str(config.seed),
        "model": config.model.model_dump_json(),
        "xi": repr(config.xi),
        "horizon": repr(config.horizon),
        "init": setup.init,
        "v0": repr(config.v0) if setup.init == "fixed" else "",
        "burn_in_time": repr(setup.burn_in_time) if setup.init == "burn-in" else "",
        "phi_prime_zero": repr(phi_derivative_at_zero(setup.sim_model)),
        "bg_index": repr(setup.beta),
        "level": repr(config.level),
        "zero_tolerance": repr(config.zero_tolerance),
    }
    if setup.truncation is not None:
        metadata.update({
            "epsilon": repr(setup.truncation.epsilon),
            "r_eps": repr(setup.cp.rate),
            "truncated_mean": repr(mean_input_rate(setup.truncation)),
            "x_max": repr(setup.cp.jobs.quantiles[-1]),
            "table_size": str(len(setup.cp.jobs.quantiles)),
        })
    return metadata


def sample_variance(values) -> float | None:
    """Unbiased sample variance, None below two values."""
    values = np.asarray(values, dtype=float)
    return float(np.var(values, ddof=1)) if values.size >= 2 else None
