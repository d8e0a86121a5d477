"""properties/ModelSection.py"""

from typing import Annotated, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..schema.exceptions import UnsupportedModelError
from ..schema.subordinator_types import (CompoundPoisson, GammaSubordinator, InverseGaussianSubordinator,
                                         SubordinatorSpec, SumSubordinator, TruncatedCP)

ModelComponent = Annotated[Union[GammaSubordinator, InverseGaussianSubordinator, CompoundPoisson],
                           Field(discriminator="kind")]


class ModelSection(BaseModel):
    """The `model` section of a config file: the independent components whose sum is the input J(.)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    # One mapping per component, e.g. {kind: gamma, shape: 2, rate: 5}.
    # A single mapping is accepted in place of a one-element list.
    components: tuple[ModelComponent, ...] = Field(min_length=1)

    @model_validator(mode="before")
    @classmethod
    def _bare_components(cls, value):
        # `model: {kind: gamma, ...}` or `model: [...]` without the components key
        if isinstance(value, dict) and "kind" in value:
            return {"components": [value]}
        if isinstance(value, list):
            return {"components": value}
        return value

    @field_validator("components", mode="before")
    @classmethod
    def _single_component(cls, value):
        return [value] if isinstance(value, dict) else value

    def to_spec(self) -> SubordinatorSpec:
        """The configured input: the single component, or the sum of all of them."""
        if len(self.components) == 1:
            return self.components[0]
        return SumSubordinator(components=self.components)

    @property
    def infinite_activity(self) -> bool:
        return any(isinstance(c, (GammaSubordinator, InverseGaussianSubordinator)) for c in self.components)

    def simulation_spec(self, epsilon: float) -> SubordinatorSpec:
        """The input actually simulated: infinite-activity inputs truncated at epsilon, compound Poisson as is.

        Raises:
            - UnsupportedModelError: If compound Poisson and infinite-activity components are mixed.
        """
        if not self.infinite_activity:
            return self.to_spec()
        if any(isinstance(c, CompoundPoisson) for c in self.components):
            raise UnsupportedModelError("Mixing compound Poisson and infinite-activity components is not simulable")
        return TruncatedCP(base=self.to_spec(), epsilon=epsilon)


# Gamma(2, 5) + inverse Gaussian(0.4, 1): E J(1) = 0.8, Blumenthal-Getoor index 1/2
CANONICAL_MODEL = ModelSection(components=(GammaSubordinator(shape=2.0, rate=5.0),
                                           InverseGaussianSubordinator(mean=0.4, shape=1.0)))
