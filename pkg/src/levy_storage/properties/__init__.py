from .ExperimentProperties import ExperimentConfig, ExperimentProperties, FigureSettings, dump_config, parse_config, \
    with_overrides
from .ModelSection import CANONICAL_MODEL, ModelSection

__all__ = [
    "CANONICAL_MODEL",
    "ExperimentConfig",
    "ExperimentProperties",
    "FigureSettings",
    "ModelSection",
    "dump_config",
    "parse_config",
    "with_overrides",
]
