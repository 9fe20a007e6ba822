import math

import pytest
from hypothesis import given, strategies as st

from qubitpack.units import UnitError, format_si, parse_db, parse_quantity


@pytest.mark.parametrize("text, unit, expected", [
    ("10 mm", "m", 0.01),
    ("0.01 m", "m", 0.01),
    ("2.21 pF", "F", 2.21e-12),
    ("1 nH", "H", 1e-9),
    ("6GHz", "Hz", 6e9),
    ("500 MHz", "Hz", 5e8),
    ("10 mK", "K", 0.01),
    ("20 us", "s", 20e-6),
    ("20 µs", "s", 20e-6),
    ("50 ohm", "Ohm", 50.0),
    ("1 mΩ", "Ohm", 1e-3),
    ("1 mm2", "m2", 1e-6),
    ("3 mm^2", "m2", 3e-6),
    ("20 uW", "W", 20e-6),
    ("-110 dBm", "W", 1e-14),
    ("inf", "s", math.inf),
    (1.5e-3, "m", 1.5e-3),
    ("4", "K", 4.0),
])
def test_parse_quantity(text, unit, expected):
    assert parse_quantity(text, unit) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("text, unit, match", [
    ("10 furlongs", "m", "unknown unit"),
    ("10 mm", "Hz", "not a Hz"),
    ("-110 dBm", "Hz", "power"),
    ("3 dB", "W", "dB"),
    ("ten mm", "m", "cannot parse"),
    (True, "m", "expected a quantity"),
    (None, "m", "expected a quantity"),
])
def test_parse_quantity_errors(text, unit, match):
    with pytest.raises(UnitError, match=match):
        parse_quantity(text, unit, "field")


def test_error_names_field():
    with pytest.raises(UnitError, match="cavities\\[0\\].a"):
        parse_quantity("1 parsec", "m", "cavities[0].a")


def test_parse_db():
    assert parse_db("20 dB") == 20.0
    assert parse_db("-30") == -30.0
    assert parse_db(6) == 6.0
    with pytest.raises(UnitError):
        parse_db("20 dBm")


def test_format_si():
    assert format_si(3.39e9, "Hz") == "3.39 GHz"
    assert format_si(2.21e-12, "F") == "2.21 pF"
    assert format_si(0, "W") == "0 W"
    assert format_si(math.inf, "s") == "inf s"


@given(st.floats(1e-15, 1e14))
def test_format_round_trip(x):
    assert parse_quantity(format_si(x, "Hz", digits=17), "Hz") == pytest.approx(x, rel=1e-12)
