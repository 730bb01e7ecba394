import dataclasses
import json
from fractions import Fraction

import numpy as np

# beyond this an int no longer survives a JSON float round trip
_SAFE_INT = 2 ** 53


def safe_json(obj):
    """Recursively convert non-JSON-safe types (Fraction, big ints, numpy, dataclasses, etc.)."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return safe_json(obj.numerator)
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, int):
        return str(obj) if abs(obj) >= _SAFE_INT else obj
    if isinstance(obj, np.generic):
        return safe_json(obj.item())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: safe_json(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if hasattr(obj, "to_json"):
        return safe_json(obj.to_json())
    if isinstance(obj, dict):
        return {_key(k): safe_json(v) for k, v in obj.items()}
    if isinstance(obj, set):
        return [safe_json(v) for v in sorted(obj, key=repr)]
    if isinstance(obj, (list, tuple)):
        return [safe_json(v) for v in obj]
    return obj


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(safe_json(x)) for x in k)
    return str(safe_json(k))


def parse_rational(value) -> Fraction:
    """int, "num/den" or decimal-integer string; floats are rejected."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"not an exact rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"decimal notation is not exact: {value!r}")
        return Fraction(text)
    raise ValueError(f"cannot parse rational from {type(value).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(safe_json(obj), sort_keys=True, separators=(",", ":"))


def read_json(path, fallback=None):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError):
        return fallback
