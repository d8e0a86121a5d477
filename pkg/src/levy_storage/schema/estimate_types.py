"""estimate_types.py: Probe samples and the estimates computed from them."""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, PositiveInt, field_validator, \
    model_validator


class ProbeSample(BaseModel):
    """Poisson probe epochs rounded to the observation grid, with the workload seen at each of them.

    Properties:
        - xi:              Probe rate.
        - delta:           Grid width.
        - horizon:         Observation horizon T.
        - probe_times:     S_1 < ... < S_n, partial sums of i.i.d. Exp(xi) variables.
        - rounded_indices: k_i = floor(S_i / delta + 1/2); two probes may share a grid point.
        - values:          values[0] = V(0) and values[i] = V(k_i delta) for i = 1..n.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    xi: PositiveFloat
    delta: PositiveFloat
    horizon: PositiveFloat
    probe_times: np.ndarray
    rounded_indices: np.ndarray
    values: np.ndarray

    @field_validator("probe_times", "values", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float).reshape(-1)

    @field_validator("rounded_indices", mode="before")
    @classmethod
    def _as_index_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=np.int64).reshape(-1)

    @model_validator(mode="after")
    def _check_sample(self) -> "ProbeSample":
        n = self.probe_times.size
        if n < 1:
            raise ValueError("a probe sample needs at least one probe")
        if self.rounded_indices.size != n or self.values.size != n + 1:
            raise ValueError("expected n rounded indices and n + 1 values")
        if np.any(np.diff(self.probe_times) <= 0.0) or self.probe_times[0] <= 0.0:
            raise ValueError("probe times must be positive and strictly increasing")
        if np.any(self.rounded_indices < 0) or np.any(self.rounded_indices * self.delta > self.horizon * (1 + 1e-12)):
            raise ValueError("rounded probes must lie on the grid inside [0, T]")
        return self

    @property
    def n(self) -> int:
        return int(self.probe_times.size)


class ConfidenceInterval(BaseModel):
    """Symmetric normal confidence interval."""
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    level: float = Field(gt=0.0, lt=1.0)


class Estimate(BaseModel):
    """Lévy-exponent estimate at one alpha, with the summary statistics it was computed from.

    Properties:
        - alpha:         Argument of the exponent.
        - phi_hat:       The estimate.
        - n:             Number of probes.
        - xi:            Probe rate.
        - zero_fraction: Share of probes i = 1..n that saw an empty system.
        - lst_mean:      Mean of exp(-alpha V_i) over i = 1..n.
        - v_first:       V_0, the workload at time 0.
        - v_last:        V_n, the workload at the last probe.
        - sigma_hat_sq:  Plug-in asymptotic variance, when available.
        - ci:            Confidence interval, present only with sigma_hat_sq.
    """
    model_config = ConfigDict(frozen=True)

    alpha: NonNegativeFloat
    phi_hat: float
    n: PositiveInt
    xi: PositiveFloat
    zero_fraction: float = Field(ge=0.0, le=1.0)
    lst_mean: float = Field(ge=0.0, le=1.0)
    v_first: NonNegativeFloat
    v_last: NonNegativeFloat
    sigma_hat_sq: NonNegativeFloat | None = None
    ci: ConfidenceInterval | None = None

    @model_validator(mode="after")
    def _ci_needs_variance(self) -> "Estimate":
        if self.ci is not None and self.sigma_hat_sq is None:
            raise ValueError("a confidence interval requires sigma_hat_sq")
        return self

    def recomputed_phi(self) -> float:
        """phi_hat rebuilt from the summary statistics and the endpoint terms."""
        endpoint = self.xi / self.n * (math.exp(-self.alpha * self.v_last) - math.exp(-self.alpha * self.v_first))
        return (endpoint + self.alpha * self.zero_fraction) / self.lst_mean


class ResampleEstimate(BaseModel):
    """Average of K estimates computed on one grid with independent probe draws.

    Properties:
        - alpha:         Argument of the exponent.
        - phi_hats:      The K per-iteration estimates.
        - probe_counts:  n(k) for each iteration.
        - mean_phi:      Arithmetic mean of phi_hats; derived.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: NonNegativeFloat
    phi_hats: np.ndarray
    probe_counts: np.ndarray
    mean_phi: float = math.nan

    @field_validator("phi_hats", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float).reshape(-1)

    @field_validator("probe_counts", mode="before")
    @classmethod
    def _as_count_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=np.int64).reshape(-1)

    @model_validator(mode="after")
    def _average(self) -> "ResampleEstimate":
        if self.phi_hats.size < 1 or self.phi_hats.size != self.probe_counts.size:
            raise ValueError("expected K >= 1 estimates with one probe count each")
        object.__setattr__(self, "mean_phi", float(np.mean(self.phi_hats)))
        return self

    @property
    def K(self) -> int:
        return int(self.phi_hats.size)

    @property
    def per_iteration(self) -> list[tuple[float, int]]:
        return [(float(p), int(c)) for p, c in zip(self.phi_hats, self.probe_counts)]


class ResampleCurve(BaseModel):
    """Resampling estimator on a grid of alphas; row k of `phi_hats` is iteration k."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alphas: np.ndarray
    phi_hats: np.ndarray
    probe_counts: np.ndarray

    @property
    def K(self) -> int:
        return int(self.phi_hats.shape[0])

    @property
    def mean_curve(self) -> np.ndarray:
        return self.phi_hats.mean(axis=0)
