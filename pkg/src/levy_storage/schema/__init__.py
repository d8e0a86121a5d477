from .estimate_types import ConfidenceInterval, Estimate, ProbeSample, ResampleCurve, ResampleEstimate
from .exceptions import (ConfigError, DomainError, EmptyProbeSampleError, ModelSpecError, NumericalError,
                         SimulationLimitError, SingularityError, StationarySamplerUnavailableError, ToolkitError,
                         UnstableModelError, UnsupportedModelError, VarianceUnavailableError)
from .path_types import GridObservations, WorkloadPath
from .report_types import ExperimentReport, ReportRow, SummaryEntry
from .subordinator_types import (CompoundPoisson, DeterministicJobs, ExponentialJobs, GammaSubordinator,
                                 InverseGaussianSubordinator, JobDistribution, SubordinatorSpec, SumSubordinator,
                                 TabulatedJobs, TruncatedCP)

__all__ = [
    "CompoundPoisson",
    "ConfidenceInterval",
    "ConfigError",
    "DeterministicJobs",
    "DomainError",
    "EmptyProbeSampleError",
    "Estimate",
    "ExperimentReport",
    "ExponentialJobs",
    "GammaSubordinator",
    "GridObservations",
    "InverseGaussianSubordinator",
    "JobDistribution",
    "ModelSpecError",
    "NumericalError",
    "ProbeSample",
    "ReportRow",
    "ResampleCurve",
    "ResampleEstimate",
    "SimulationLimitError",
    "SingularityError",
    "StationarySamplerUnavailableError",
    "SubordinatorSpec",
    "SumSubordinator",
    "SummaryEntry",
    "TabulatedJobs",
    "ToolkitError",
    "TruncatedCP",
    "UnstableModelError",
    "UnsupportedModelError",
    "VarianceUnavailableError",
    "WorkloadPath",
]
