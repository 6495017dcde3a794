"""Field-path aware readers for configuration mappings."""

import math
from typing import Any, Mapping, Optional

from core.errors import ConfigurationError

_MISSING = object()


def section(data: Mapping[str, Any], key: str, path: str = "", required: bool = True) -> Mapping[str, Any]:
    field = f"{path}.{key}" if path else key
    value = data.get(key, _MISSING) if isinstance(data, Mapping) else _MISSING
    if value is _MISSING or value is None:
        if required:
            raise ConfigurationError("missing", field=field)
        return {}
    if not isinstance(value, Mapping):
        raise ConfigurationError("expected a mapping", field=field)
    return value


def number(
    data: Mapping[str, Any],
    key: str,
    path: str = "",
    default: Any = _MISSING,
    minimum: Optional[float] = None,
    maximum: Optional[float] = None,
    exclusive_minimum: bool = False,
) -> float:
    field = f"{path}.{key}" if path else key
    raw = data.get(key, default)
    if raw is _MISSING or raw is None:
        if default is None:
            return None  # type: ignore[return-value]
        raise ConfigurationError("missing", field=field)
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"expected a number, got {raw!r}", field=field) from exc
    if math.isnan(value):
        raise ConfigurationError("must not be NaN", field=field)
    if minimum is not None:
        if exclusive_minimum and not value > minimum:
            raise ConfigurationError(f"must be greater than {minimum}", field=field)
        if not exclusive_minimum and value < minimum:
            raise ConfigurationError(f"must be at least {minimum}", field=field)
    if maximum is not None and value > maximum:
        raise ConfigurationError(f"must be at most {maximum}", field=field)
    return value


def integer(data: Mapping[str, Any], key: str, path: str = "", default: Any = _MISSING, minimum: Optional[int] = None) -> int:
    field = f"{path}.{key}" if path else key
    raw = data.get(key, default)
    if raw is _MISSING or raw is None:
        if default is None:
            return None  # type: ignore[return-value]
        raise ConfigurationError("missing", field=field)
    if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
        raise ConfigurationError(f"expected an integer, got {raw!r}", field=field)
    try:
        value = int(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"expected an integer, got {raw!r}", field=field) from exc
    if minimum is not None and value < minimum:
        raise ConfigurationError(f"must be at least {minimum}", field=field)
    return value


def choice(data: Mapping[str, Any], key: str, options, path: str = "", default: Any = _MISSING) -> str:
    field = f"{path}.{key}" if path else key
    raw = data.get(key, default)
    if raw is _MISSING or raw is None:
        raise ConfigurationError("missing", field=field)
    value = str(raw)
    if value not in options:
        raise ConfigurationError(f"'{value}' is not one of {', '.join(options)}", field=field)
    return value


__all__ = ["choice", "integer", "number", "section"]
