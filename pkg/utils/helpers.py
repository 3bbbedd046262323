import uuid
from pathlib import Path

from services.errors import ConfigError


def get_run_id():
    """Generate a short id that tags every log line of one command run"""
    return str(uuid.uuid4())[:8]


def read_input_bytes(path, max_bytes=64 * 1024 * 1024):
    """Read an input file, refusing anything larger than max_bytes"""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"Input file not found: {path}")
    size = p.stat().st_size
    if size > max_bytes:
        raise ConfigError(f"Input too large: {size} bytes (max {max_bytes})")
    return p.read_bytes()


def parse_int_range(text):
    """'7:24' -> [7..24]; '5' -> [5]; '1,2,3' -> [1, 2, 3]"""
    text = str(text).strip()
    try:
        if ':' in text:
            lo, hi = text.split(':', 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ConfigError(f"Empty range: {text}")
            return list(range(lo, hi + 1))
        return [int(tok) for tok in text.split(',') if tok.strip()]
    except ValueError as e:
        raise ConfigError(f"Not an integer range: {text!r}") from e


def parse_number(token):
    """Accepts plain floats and powers of two written as 2^-20."""
    token = str(token).strip()
    try:
        if token.startswith('2^'):
            return 2.0 ** int(token[2:])
        return float(token)
    except ValueError as e:
        raise ConfigError(f"Not a number: {token!r}") from e


def parse_number_list(text):
    return [parse_number(tok) for tok in str(text).split(',') if tok.strip()]
