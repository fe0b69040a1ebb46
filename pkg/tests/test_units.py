import math

import pytest
from hypothesis import given, strategies as st

from lzcontrol import InvalidArgumentError, convert_units


def test_factors():
    assert convert_units(1.0, "time") == 2.0e-8
    assert convert_units(1.0, "energy") == 5.273e-27
    assert convert_units(1.0, "angular-momentum") == 1.055e-34
    assert convert_units(2.0e-8, "time", "si->scaled") == 1.0


@given(st.floats(-1e12, 1e12, allow_nan=False), st.sampled_from(["time", "energy", "angular-momentum"]))
def test_round_trip(value, quantity):
    back = convert_units(convert_units(value, quantity, "scaled->si"), quantity, "si->scaled")
    assert back == pytest.approx(value, rel=1e-15, abs=0)


def test_errors():
    with pytest.raises(InvalidArgumentError):
        convert_units(1.0, "length")
    with pytest.raises(InvalidArgumentError):
        convert_units(1.0, "time", "sideways")
    with pytest.raises(InvalidArgumentError):
        convert_units(math.inf, "time")
