"""Unit-suffixed quantity parsing ("158 mV", "1 MV/cm", "28 h") to SI floats.

Every dimensioned value in the workbench config is a string with an explicit
unit suffix; this module normalizes them to SI and checks the dimension the
schema expects.  Supported dimensions:

    voltage (V), capacitance (F), energy (J), power (W), time (s, min, h, d),
    length (m), frequency (Hz), temperature (K), charge (C), bytes (B),
    field (V/m), charge_density (C/m^2), bandwidth (B/s)
"""

from __future__ import annotations

import re

_PREFIXES = {
    "a": 1e-18,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,  # micro sign
    "m": 1e-3,
    "c": 1e-2,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

_BASE_UNITS = {
    "V": "voltage",
    "F": "capacitance",
    "J": "energy",
    "W": "power",
    "s": "time",
    "m": "length",
    "Hz": "frequency",
    "K": "temperature",
    "C": "charge",
    "B": "bytes",
}

# Whole-word time units that are not prefix+base combinations.
_TIME_WORDS = {"min": 60.0, "h": 3600.0, "d": 86400.0}

# (numerator dim, denominator dim, denominator exponent) -> composite dim
_COMPOSITE_DIMS = {
    ("voltage", "length", 1): "field",
    ("charge", "length", 2): "charge_density",
    ("bytes", "time", 1): "bandwidth",
    ("energy", "time", 1): "power",
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?[0-9.eE+-]+)\s*([^\s]+)\s*$")


class UnitError(ValueError):
    """Raised for unparseable unit strings or dimension mismatches."""


def _parse_simple_unit(token: str) -> tuple[float, str]:
    """Resolve one unit token (no slash) to (scale-to-SI, dimension)."""
    if token in _BASE_UNITS:
        return 1.0, _BASE_UNITS[token]
    if token in _TIME_WORDS:
        return _TIME_WORDS[token], "time"
    if len(token) >= 2 and token[0] in _PREFIXES and token[1:] in _BASE_UNITS:
        return _PREFIXES[token[0]], _BASE_UNITS[token[1:]]
    raise UnitError(f"unknown unit {token!r}")


def _parse_unit(unit: str) -> tuple[float, str]:
    """Resolve a unit string, possibly composite (A/B or A/B^2), to SI."""
    if "/" not in unit:
        return _parse_simple_unit(unit)
    num, _, den = unit.partition("/")
    exponent = 1
    if den.endswith("^2"):
        den, exponent = den[:-2], 2
    elif den.endswith("2") and not den[:-1].isdigit():
        den, exponent = den[:-1], 2
    num_scale, num_dim = _parse_simple_unit(num)
    den_scale, den_dim = _parse_simple_unit(den)
    key = (num_dim, den_dim, exponent)
    if key not in _COMPOSITE_DIMS:
        raise UnitError(f"unsupported composite unit {unit!r}")
    return num_scale / den_scale**exponent, _COMPOSITE_DIMS[key]


def parse_quantity(text: str) -> tuple[float, str]:
    """Parse "158 mV" style text into (SI value, dimension name)."""
    match = _QUANTITY_RE.match(text)
    if not match:
        raise UnitError(f"cannot parse quantity {text!r} (expected 'NUMBER UNIT')")
    number, unit = match.groups()
    try:
        value = float(number)
    except ValueError as exc:
        raise UnitError(f"bad number in quantity {text!r}") from exc
    scale, dim = _parse_unit(unit)
    return value * scale, dim


def si(value: str | float | int, dimension: str) -> float:
    """Normalize a config value to SI, enforcing the expected dimension.

    Plain numbers are only allowed for dimensionless values; everything else
    must carry a unit suffix so the config stays self-describing.
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if dimension == "dimensionless":
            return float(value)
        raise UnitError(f"expected a '{dimension}' quantity with units, got bare {value!r}")
    if not isinstance(value, str):
        raise UnitError(f"expected quantity string, got {type(value).__name__}")
    magnitude, dim = parse_quantity(value)
    if dim != dimension:
        raise UnitError(f"expected dimension '{dimension}', got '{dim}' in {value!r}")
    return magnitude
