import csv
import json
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import jsonschema
import numpy as np

from services.errors import BoostError
from services.ext_prob import ExtProb
from utils.logging import log_structured

SCHEMA_DIR = Path(__file__).resolve().parent.parent / 'schemas'


def to_jsonable(obj):
    """ExtProb -> {mantissa, exp2, decimal}; non-finite floats -> None; numpy scalars -> Python."""
    if isinstance(obj, ExtProb):
        return obj.to_dict()
    if hasattr(obj, 'to_dict') and not isinstance(obj, type):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


@lru_cache(maxsize=None)
def load_schema(command):
    path = SCHEMA_DIR / f"{command}.schema.json"
    if not path.is_file():
        raise BoostError(f"No report schema for command '{command}'")
    return json.loads(path.read_text())


def validate_report(data, command):
    validator = jsonschema.Draft7Validator(load_schema(command))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        where = '/'.join(str(p) for p in first.path) or '<root>'
        log_structured('ERROR', 'Report failed schema validation', command=command, at=where, error=first.message)
        raise BoostError(f"{command} report does not match its schema at {where}: {first.message}")


def render_report(payload, command):
    data = to_jsonable(payload)
    validate_report(data, command)
    return json.dumps(data, indent=2)


def write_report(payload, command, path=None):
    """Validated JSON text; also written to path when given."""
    text = render_report(payload, command)
    if path:
        Path(path).write_text(text + '\n')
        log_structured('DEBUG', 'Report written', command=command, path=path)
    return text


def write_csv(path, header, rows):
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    log_structured('DEBUG', 'CSV written', path=path, rows=count)
    return count
