"""path_types.py: Sample paths of the reflected workload process and their observation on an equidistant grid."""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeFloat, PositiveFloat, field_validator, model_validator

from .exceptions import DomainError

# Slack on T / Delta so that T = m * Delta computed in floating point still yields m grid steps
GRID_SLACK = 1e-12


def grid_size(horizon: float, delta: float) -> int:
    """m = floor(T / Delta), the index of the last grid point inside [0, T]."""
    return int(math.floor(horizon / delta * (1.0 + GRID_SLACK)))


def _reflect(v0: float, event_times: np.ndarray, jump_sizes: np.ndarray) -> np.ndarray:
    """Post-jump workload at every event: V = X + max(v0, -inf X), with the infimum attained just before jumps."""
    if event_times.size == 0:
        return np.empty(0)
    total = np.cumsum(jump_sizes)
    before = np.concatenate(([0.0], total[:-1])) - event_times
    regulator = np.maximum(v0, -np.minimum.accumulate(before))
    return total - event_times + regulator


class WorkloadPath(BaseModel):
    """Exact event-driven representation of a reflected workload path on [0, T].

    Properties:
        - v0:          Initial workload V(0).
        - event_times: Jump epochs, strictly increasing, in (0, T].
        - jump_sizes:  Jump sizes, strictly positive.
        - horizon:     T.
        - post_jump:   V at each jump epoch, jump included; derived from the fields above.

    Between jumps the workload drains at unit rate and sticks at 0.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    v0: NonNegativeFloat
    event_times: np.ndarray
    jump_sizes: np.ndarray
    horizon: PositiveFloat
    post_jump: np.ndarray | None = None

    @field_validator("event_times", "jump_sizes", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float).reshape(-1)

    @model_validator(mode="after")
    def _check_events(self) -> "WorkloadPath":
        times, sizes = self.event_times, self.jump_sizes
        if times.size != sizes.size:
            raise ValueError("event_times and jump_sizes must have the same length")
        if times.size:
            if times[0] <= 0.0 or times[-1] > self.horizon:
                raise ValueError("event times must lie in (0, T]")
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("event times must be strictly increasing")
            if np.any(sizes <= 0.0):
                raise ValueError("jump sizes must be strictly positive")
        object.__setattr__(self, "post_jump", _reflect(self.v0, times, sizes))
        return self

    @property
    def event_count(self) -> int:
        return int(self.event_times.size)


class GridObservations(BaseModel):
    """Workload observed at the grid points i * Delta, i = 0..m, m = floor(T / Delta)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: PositiveFloat
    horizon: PositiveFloat
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float).reshape(-1)

    @model_validator(mode="after")
    def _check_values(self) -> "GridObservations":
        if self.values.size != grid_size(self.horizon, self.delta) + 1:
            raise ValueError(f"expected {grid_size(self.horizon, self.delta) + 1} grid values, got {self.values.size}")
        if np.any(self.values < 0.0):
            raise ValueError("workload values must be nonnegative")
        return self

    @property
    def m(self) -> int:
        return int(self.values.size - 1)

    @property
    def times(self) -> np.ndarray:
        return np.minimum(np.arange(self.values.size) * self.delta, self.horizon)

    def truncate(self, horizon: float) -> "GridObservations":
        """The observations on [0, horizon], a prefix of this grid."""
        if not 0.0 < horizon <= self.horizon:
            raise DomainError(f"horizon must lie in (0, {self.horizon}], got {horizon}")
        return GridObservations(delta=self.delta, horizon=horizon,
                                values=self.values[:grid_size(horizon, self.delta) + 1])
