"""utils.py: Typed property lookups for the configuration layer.

Every getter resolves a key the same way: the value in the property dictionary first, then the environment variable,
then the default. Values that are blank or fail to convert fall through to the next source.
"""

import os
from typing import Any, Callable, TypeVar

T = TypeVar("T")

_TRUE_WORDS = ("true", "yes", "1", "y", "on")
_FALSE_WORDS = ("false", "no", "0", "n", "off")


def _lookup(props: dict, prop_name: str, env_var_name: str | None, convert: Callable[[Any], T | None],
            default_value: T | None) -> T | None:
    """Resolves one property through props, environment and default, applying `convert` to each candidate.

    `convert` returns None for values it cannot use.
    """
    value = props.get(prop_name, None)
    if value is not None:
        converted = convert(value)
        if converted is not None:
            return converted

    if env_var_name and env_var_name.strip():
        env_value = os.getenv(env_var_name)
        if env_value is not None:
            converted = convert(env_value)
            if converted is not None:
                return converted

    return default_value


def _to_str(value: Any) -> str | None:
    value_str = value if isinstance(value, str) else str(value)
    return value_str if value_str.strip() else None


def _to_int(value: Any) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        return None


def _to_float(value: Any) -> float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        return None


def _to_bool(value: Any) -> bool | None:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    word = str(value).strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    return None


def _to_float_list(value: Any) -> list[float] | None:
    items = value.split(",") if isinstance(value, str) else value
    if not isinstance(items, (list, tuple)):
        return None
    floats = [_to_float(item) for item in items if not (isinstance(item, str) and not item.strip())]
    if not floats or any(f is None for f in floats):
        return None
    return floats


def get_str_property(props: dict, prop_name: str, env_var_name: str | None = None, default_value: str | None = None,
                     ) -> str | None:
    """Gets a string property; non-string values are converted with str(), blank strings are skipped.

    Args:
        :param props:         Dictionary containing properties.
        :param prop_name:     Name of the property to retrieve.
        :param env_var_name:  Environment variable to check if the property isn't usable in the dictionary.
        :param default_value: Value returned if neither source yields a usable value.
    """
    return _lookup(props, prop_name, env_var_name, _to_str, default_value)


def get_int_property(props: dict, prop_name: str, env_var_name: str | None = None, default_value: int | None = None,
                     ) -> int | None:
    """Gets an integer property; strings are stripped and parsed, booleans are rejected."""
    return _lookup(props, prop_name, env_var_name, _to_int, default_value)


def get_float_property(props: dict, prop_name: str, env_var_name: str | None = None,
                       default_value: float | None = None,
                       ) -> float | None:
    """Gets a float property; integers are widened, strings are stripped and parsed (e.g. "1e-5")."""
    return _lookup(props, prop_name, env_var_name, _to_float, default_value)


def get_bool_property(props: dict, prop_name: str, env_var_name: str | None = None, default_value: bool | None = None,
                      ) -> bool | None:
    """Gets a boolean property; accepts true/false, yes/no, on/off, y/n and 1/0 in any case."""
    return _lookup(props, prop_name, env_var_name, _to_bool, default_value)


def get_float_list_property(props: dict, prop_name: str, env_var_name: str | None = None,
                            default_value: list[float] | None = None,
                            ) -> list[float] | None:
    """Gets a list of floats; a YAML list or a comma-separated string such as "0.5, 1, 2".

    A list with any unparsable entry is rejected as a whole.
    """
    return _lookup(props, prop_name, env_var_name, _to_float_list, default_value)
