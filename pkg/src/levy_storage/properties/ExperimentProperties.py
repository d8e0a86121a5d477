"""ExperimentProperties.py: Experiment configuration and its YAML loader."""

import os
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, PositiveInt, ValidationError, \
    field_validator
from yaml import YAMLError

from .ModelSection import CANONICAL_MODEL, ModelSection
from ..levy.measure import DEFAULT_EPSILON, DEFAULT_TABLE_SIZE, MIN_TABLE_SIZE
from ..logger import get_logger
from ..schema.exceptions import ConfigError
from ..simulation.workload import DEFAULT_MAX_EVENTS
from ..utils import get_float_list_property, get_float_property, get_int_property, get_str_property

CONFIG_ENV_VAR = "LEVY_STORAGE_CONFIG"


def _hyphenate(name: str) -> str:
    return name.replace("_", "-")


def _underscore_keys(value):
    """Hyphens in mapping keys become underscores, at every depth."""
    if isinstance(value, dict):
        return {(k.replace("-", "_") if isinstance(k, str) else k): _underscore_keys(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_underscore_keys(v) for v in value]
    return value


def _check_alphas(value: list[float]) -> list[float]:
    if not value:
        raise ValueError("at least one alpha is required")
    if any(a <= 0.0 for a in value) or any(b <= a for a, b in zip(value, value[1:])):
        raise ValueError("alphas must be positive and strictly increasing")
    return value


def _check_positive(value: list[float]) -> list[float]:
    if not value or any(v <= 0.0 for v in value):
        raise ValueError("a nonempty list of positive numbers is required")
    return value


class FigureSettings(BaseModel):
    """Set-ups of the three figure data sets written by the `figures` command."""
    model_config = ConfigDict(frozen=True, extra="forbid", alias_generator=_hyphenate, populate_by_name=True)

    alpha_max: PositiveFloat = 10.0
    alpha_step: PositiveFloat = 0.1

    # Several estimates on one path
    probe_horizon: PositiveFloat = 25.0
    probe_delta: PositiveFloat = 1.0
    probe_realisations: PositiveInt = 5

    # One estimate with confidence band; delta auto means the admissible-range rule
    interval_horizon: PositiveFloat = 100.0
    interval_delta: PositiveFloat | Literal["auto"] = "auto"

    # Resampling estimator, pairs of realisations per grid width
    resample_horizon: PositiveFloat = 25.0
    resample_size: PositiveInt = 1000
    resample_deltas: list[float] = Field(default_factory=lambda: [1.0, 0.1, 0.01])
    resample_realisations: PositiveInt = 2

    @field_validator("resample_deltas")
    @classmethod
    def _positive_deltas(cls, value: list[float]) -> list[float]:
        return _check_positive(value)


class ExperimentConfig(BaseModel):
    """Validated experiment configuration; keys are written with hyphens in YAML."""
    model_config = ConfigDict(frozen=True, extra="forbid", alias_generator=_hyphenate, populate_by_name=True)

    model: ModelSection = CANONICAL_MODEL
    # Truncation level for infinite-activity components
    epsilon: PositiveFloat = DEFAULT_EPSILON
    xi: PositiveFloat = 1.0
    delta: PositiveFloat | Literal["auto"] = "auto"
    deltas: list[float] = Field(default_factory=lambda: [0.1, 0.5, 2.0])
    # When set, delta auto means (xi T)^-grid_exponent instead of the admissible-range rule
    grid_exponent: PositiveFloat | None = None
    horizon: PositiveFloat = 100.0
    alphas: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    resample_size: PositiveInt = 1
    resample_sizes: list[PositiveInt] = Field(default_factory=lambda: [1, 100])
    resample_repeats: PositiveInt = 2
    replications: PositiveInt = 1
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    init: Literal["stationary", "burn-in", "fixed"] = "stationary"
    v0: NonNegativeFloat = 0.0
    # Warm-up time of init burn-in, default 50 / phi'(0)
    burn_in_time: PositiveFloat | None = None
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    threads: PositiveInt = 1
    table_size: int = Field(default=DEFAULT_TABLE_SIZE, ge=MIN_TABLE_SIZE)
    max_events: PositiveInt = DEFAULT_MAX_EVENTS
    # Number of horizon doublings of the consistency schedule, ending at horizon
    doublings: int = Field(default=4, ge=0)
    zero_tolerance: NonNegativeFloat = 0.0
    figures: FigureSettings = Field(default_factory=FigureSettings)

    @field_validator("alphas")
    @classmethod
    def _increasing_alphas(cls, value: list[float]) -> list[float]:
        return _check_alphas(value)

    @field_validator("deltas")
    @classmethod
    def _positive_deltas(cls, value: list[float]) -> list[float]:
        return _check_positive(value)


# Keys that fall back to an environment variable when the file leaves them out
_ENV_FALLBACKS = (
    ("seed", "LEVY_STORAGE_SEED", get_int_property),
    ("threads", "LEVY_STORAGE_THREADS", get_int_property),
    ("xi", "LEVY_STORAGE_XI", get_float_property),
    ("horizon", "LEVY_STORAGE_HORIZON", get_float_property),
    ("epsilon", "LEVY_STORAGE_EPSILON", get_float_property),
    ("replications", "LEVY_STORAGE_REPLICATIONS", get_int_property),
    ("init", "LEVY_STORAGE_INIT", get_str_property),
    ("alphas", "LEVY_STORAGE_ALPHAS", get_float_list_property),
    ("deltas", "LEVY_STORAGE_DELTAS", get_float_list_property),
)


def _key_lines(text: str) -> dict[str, int]:
    """1-based line of every top-level key of a YAML mapping."""
    try:
        node = yaml.compose(text)
    except YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {str(key.value).replace("-", "_"): key.start_mark.line + 1 for key, _ in node.value}


def _validate(properties: dict, text: str = "") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(properties)
    except ValidationError as e:
        first = e.errors()[0]
        location = [str(part) for part in first["loc"]]
        field = ".".join(location) if location else None
        line = _key_lines(text).get(location[0].replace("-", "_")) if location and text else None
        raise ConfigError(f"Invalid configuration: {first['msg']}", field=field, line=line) from e


def parse_config(text: str) -> ExperimentConfig:
    """Validates a config given as YAML text, without environment fallbacks."""
    try:
        properties = yaml.safe_load(text)
    except YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"Error parsing YAML: {e}", line=mark.line + 1 if mark else None) from e
    if properties is None:
        properties = {}
    if not isinstance(properties, dict):
        raise ConfigError("The configuration must be a mapping", line=1)
    return _validate(_underscore_keys(properties), text)


def dump_config(config: ExperimentConfig) -> str:
    """YAML text of a config; parse_config(dump_config(c)) == c."""
    return yaml.safe_dump(config.model_dump(mode="json", by_alias=True), sort_keys=False)


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """A copy of `config` with the given keys replaced, validated again; None values are ignored.

    Raises:
        - ConfigError: If an override is invalid.
    """
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return config
    return _validate({**config.model_dump(), **overrides})


class ExperimentProperties:
    """Loader of experiment configurations."""

    # Path the last configuration was loaded from, None for built-in defaults.
    properties_path: str | None = None

    def __init__(self):
        pass

    def load(self, properties_path: str | None = None) -> ExperimentConfig:
        """Loads and validates a YAML config file.

        Without a path, the file named by LEVY_STORAGE_CONFIG is used, then ./config.yaml, then
        ~/.config/levy-storage/config.yaml. When none of those exists the built-in defaults apply.

        Raises:
            - ConfigError: If the file is missing, unreadable, not YAML, or fails validation.
        """
        log = get_logger()

        if properties_path is None:
            env_path = os.getenv(CONFIG_ENV_VAR)
            candidates = [env_path] if env_path and env_path.strip() else []
            candidates += ["config.yaml", os.path.join(os.path.expanduser("~"), ".config", "levy-storage",
                                                       "config.yaml")]
            properties_path = next((p for p in candidates if os.path.exists(p)), None)
            if properties_path is None:
                if candidates and candidates[0] == env_path:
                    log.error(f"Config file {env_path} named by {CONFIG_ENV_VAR} does not exist.")
                    raise ConfigError(f"Config file {env_path} does not exist")
                log.info("No config file found; using built-in defaults.")
                self.properties_path = None
                return self._from_properties({}, "")
        elif not os.path.exists(properties_path):
            log.error(f"Config file {properties_path} does not exist.")
            raise ConfigError(f"Config file {properties_path} does not exist")

        log.info(f"Loading configuration from {properties_path}.")

        try:
            with open(properties_path, "r", encoding="utf-8") as file:
                text = file.read()
            properties = yaml.safe_load(text)

            if properties is None:
                log.warning(f"Config file {properties_path} is empty.")
                properties = {}
            if not isinstance(properties, dict):
                raise ConfigError(f"Config file {properties_path} must hold a mapping", line=1)

            config = self._from_properties(_underscore_keys(properties), text)
        except YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            log.error(f"Error parsing YAML file: {e}.")
            raise ConfigError(f"Error parsing YAML file {properties_path}: {e}",
                              line=mark.line + 1 if mark else None) from e
        except OSError as e:
            log.error(f"Error reading config file: {e}.")
            raise ConfigError(f"Error reading config file {properties_path}: {e}") from e
        except ConfigError as e:
            log.error(f"{e}.")
            raise

        self.properties_path = properties_path
        return config

    @staticmethod
    def _from_properties(properties: dict, text: str) -> ExperimentConfig:
        log = get_logger()

        for key, env_var_name, getter in _ENV_FALLBACKS:
            value = getter(props=properties, prop_name=key, env_var_name=env_var_name)
            if value is not None and key not in properties:
                properties[key] = value
                log.info(f"{key} set from {env_var_name} to: {value}.")

        config = _validate(properties, text)
        for key in properties:
            log.info(f"{key} set to: {getattr(config, key)}.")
        return config
