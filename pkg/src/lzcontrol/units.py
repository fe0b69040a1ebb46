"""Scaled (hbar = 1, t_f = 1) versus SI units for the double-quantum-dot qubit."""

from __future__ import annotations

import math

from .errors import InvalidArgumentError

TIME_SI = 2.0e-8                 # s per scaled time unit
ENERGY_SI = 5.273e-27            # J per scaled energy unit
ANGULAR_MOMENTUM_SI = 1.055e-34  # J s per scaled unit (hbar)

FACTORS = {
    "time": TIME_SI,
    "energy": ENERGY_SI,
    "angular-momentum": ANGULAR_MOMENTUM_SI,
}
DIRECTIONS = ("scaled->si", "si->scaled")


def convert_units(value: float, quantity: str, direction: str = "scaled->si") -> float:
    try:
        factor = FACTORS[quantity]
    except KeyError:
        raise InvalidArgumentError(f"unknown quantity {quantity!r}") from None
    if direction not in DIRECTIONS:
        raise InvalidArgumentError(f"unknown direction {direction!r}")
    if not math.isfinite(value):
        raise InvalidArgumentError("value must be finite")
    return value * factor if direction == "scaled->si" else value / factor
