import math

from services.errors import ConfigError


def require_int(name, value, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            value = int(str(value).strip())
        except ValueError:
            raise ConfigError(f"{name} must be an integer (got {value!r})")
    if lo is not None and value < lo:
        raise ConfigError(f"{name} must be >= {lo} (got {value})")
    if hi is not None and value > hi:
        raise ConfigError(f"{name} must be <= {hi} (got {value})")
    return value


def require_float(name, value, lo=None, hi=None):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number (got {value!r})")
    if math.isnan(value) or math.isinf(value):
        raise ConfigError(f"{name} must be finite (got {value})")
    if lo is not None and value < lo:
        raise ConfigError(f"{name} must be >= {lo} (got {value})")
    if hi is not None and value > hi:
        raise ConfigError(f"{name} must be <= {hi} (got {value})")
    return value


def require_bool(name, value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ConfigError(f"{name} must be a boolean (got {value!r})")
