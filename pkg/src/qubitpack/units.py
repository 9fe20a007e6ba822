"""Parsing of quantity strings such as ``"10 mm"``, ``"2.21 pF"`` or ``"-110 dBm"`` into SI floats."""
from __future__ import annotations

import math
import re

PREFIXES = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6,
    "m": 1e-3, "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}

# Canonical unit name for each dimension; aliases map onto these.
BASE_UNITS = {
    "Hz": "Hz", "m": "m", "m2": "m2", "F": "F", "H": "H", "Ohm": "Ohm", "S": "S",
    "K": "K", "W": "W", "s": "s",
}
ALIASES = {"ohm": "Ohm", "Ω": "Ohm", "m^2": "m2", "m²": "m2", "sec": "s"}

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf"
_QUANTITY = re.compile(rf"^\s*({_NUMBER})\s*([^\s\d].*?)?\s*$")


class UnitError(ValueError):
    pass


def _split_unit(unit: str) -> tuple[float, str]:
    unit = ALIASES.get(unit, unit)
    if unit in BASE_UNITS:
        return 1.0, unit
    if unit in ("dB", "dBm"):
        return 1.0, unit
    for prefix in sorted(PREFIXES, key=len, reverse=True):
        if prefix and unit.startswith(prefix):
            rest = ALIASES.get(unit[len(prefix):], unit[len(prefix):])
            if rest in BASE_UNITS:
                scale = PREFIXES[prefix]
                if rest == "m2":
                    scale = scale**2
                return scale, rest
    raise UnitError(f"unknown unit suffix {unit!r}")


def parse_quantity(value, unit: str, field: str = "value") -> float:
    """Return ``value`` in the SI ``unit`` (``Hz``, ``m``, ``m2``, ``F``, ``H``, ``Ohm``, ``S``, ``K``, ``W``, ``s``).

    Bare numbers are taken as already SI. ``dBm`` converts to watts when ``unit`` is ``W``.
    """
    if isinstance(value, bool):
        raise UnitError(f"{field}: expected a quantity, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"{field}: expected a quantity, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise UnitError(f"{field}: cannot parse quantity {value!r}")
    number = float(m.group(1))
    suffix = m.group(2)
    if not suffix:
        return number
    try:
        scale, base = _split_unit(suffix.strip())
    except UnitError as exc:
        raise UnitError(f"{field}: {exc}") from None
    if base == "dBm":
        if unit != "W":
            raise UnitError(f"{field}: dBm is a power unit, expected {unit}")
        return 1e-3 * 10 ** (number / 10)
    if base == "dB":
        raise UnitError(f"{field}: dB given where {unit} expected")
    if base != unit:
        raise UnitError(f"{field}: unit {suffix!r} is not a {unit} quantity")
    return number * scale


def parse_db(value, field: str = "value") -> float:
    """Ratio in dB; accepts ``"20 dB"`` or a bare number."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _QUANTITY.match(value)
        if m and (m.group(2) or "dB").strip() == "dB":
            return float(m.group(1))
    raise UnitError(f"{field}: expected a dB value, got {value!r}")


def format_si(value: float, unit: str, digits: int = 4) -> str:
    """Engineering notation, e.g. ``format_si(3.39e9, 'Hz') == '3.39 GHz'``."""
    if not math.isfinite(value):
        return f"{value} {unit}"
    if value == 0:
        return f"0 {unit}"
    exp3 = int(math.floor(math.log10(abs(value)) / 3))
    exp3 = max(-5, min(4, exp3))
    prefix = {-5: "f", -4: "p", -3: "n", -2: "u", -1: "m", 0: "", 1: "k", 2: "M", 3: "G", 4: "T"}[exp3]
    return f"{value / 10 ** (3 * exp3):.{digits}g} {prefix}{unit}"
