"""subordinator_types.py: Parametric descriptions of the input process J(.) and of compound Poisson job sizes.

All variants are immutable pydantic models tagged by a `kind` field, so a whole specification can be loaded from a
YAML mapping through the discriminated unions `JobDistribution` and `SubordinatorSpec`.
"""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator


class ExponentialJobs(BaseModel):
    """Exponentially distributed job sizes with the given rate (mean 1/rate)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["exponential"] = "exponential"
    rate: PositiveFloat


class DeterministicJobs(BaseModel):
    """Jobs of one fixed size."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["deterministic"] = "deterministic"
    size: PositiveFloat


class TabulatedJobs(BaseModel):
    """Job sizes given by a tabulated inverse CDF.

    Properties:
        - probabilities: Strictly increasing probability knots, from 0 to 1.
        - quantiles:     Job size at each knot; strictly positive and nondecreasing.

    Quantiles between knots are interpolated monotonically in log-size.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["tabulated"] = "tabulated"
    probabilities: tuple[float, ...]
    quantiles: tuple[float, ...]

    @model_validator(mode="after")
    def _check_table(self) -> "TabulatedJobs":
        p, q = self.probabilities, self.quantiles
        if len(p) != len(q) or len(p) < 2:
            raise ValueError("probabilities and quantiles must have the same length, at least 2")
        if p[0] != 0.0 or p[-1] != 1.0:
            raise ValueError("probabilities must run from 0 to 1")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("probabilities must be strictly increasing")
        if any(x <= 0.0 for x in q):
            raise ValueError("quantiles must be strictly positive")
        if any(b < a for a, b in zip(q, q[1:])):
            raise ValueError("quantiles must be nondecreasing in probability")
        return self


JobDistribution = Annotated[Union[ExponentialJobs, DeterministicJobs, TabulatedJobs], Field(discriminator="kind")]


class CompoundPoisson(BaseModel):
    """Compound Poisson input: jobs arrive at `rate` per unit time with sizes drawn from `jobs`."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["compound-poisson"] = "compound-poisson"
    rate: PositiveFloat
    jobs: JobDistribution


class GammaSubordinator(BaseModel):
    """Gamma process: J(t) ~ Gamma(shape * t, rate); Lévy density shape * x^-1 * exp(-rate * x)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["gamma"] = "gamma"
    shape: PositiveFloat
    rate: PositiveFloat


class InverseGaussianSubordinator(BaseModel):
    """Inverse Gaussian process with mean `mean` and shape `shape` per unit time."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["inverse-gaussian"] = "inverse-gaussian"
    mean: PositiveFloat
    shape: PositiveFloat


class SumSubordinator(BaseModel):
    """Sum of independent subordinators. Nested sums are flattened on construction."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["sum"] = "sum"
    components: tuple["SubordinatorSpec", ...] = Field(min_length=1)

    @field_validator("components", mode="after")
    @classmethod
    def _flatten(cls, components: tuple) -> tuple:
        flat = []
        for component in components:
            if isinstance(component, SumSubordinator):
                flat.extend(component.components)
            else:
                flat.append(component)
        return tuple(flat)


class TruncatedCP(BaseModel):
    """Compound Poisson surrogate of `base` that keeps only jumps larger than `epsilon`.

    The base must have a closed-form Lévy density: Gamma, inverse Gaussian, or a sum of those.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["truncated"] = "truncated"
    base: "SubordinatorSpec"
    epsilon: PositiveFloat

    @field_validator("base", mode="after")
    @classmethod
    def _check_density_available(cls, base):
        parts = base.components if isinstance(base, SumSubordinator) else (base,)
        for part in parts:
            if not isinstance(part, (GammaSubordinator, InverseGaussianSubordinator)):
                raise ValueError(f"truncation needs a closed-form Lévy density, got kind '{part.kind}'")
        return base


SubordinatorSpec = Annotated[
    Union[CompoundPoisson, GammaSubordinator, InverseGaussianSubordinator, SumSubordinator, TruncatedCP],
    Field(discriminator="kind"),
]

SumSubordinator.model_rebuild()
TruncatedCP.model_rebuild()
