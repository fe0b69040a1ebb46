"""Sampled control fields and the weighted control-space geometry.

Controls live on a uniform grid of ``n`` cells over ``[0, t_final]`` and are
sampled at the cell midpoints ``t_k = (k + 1/2) dt``.  Every integral in the
package (fluence, inner product, rotation angle, constraint functionals) uses
the same midpoint rule so that objective, constraints and their gradients
stay mutually consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidArgumentError

DEFAULT_SAMPLES = 1024
RAMP_FRACTION = 0.1


@dataclass(frozen=True)
class TimeGrid:
    n: int = DEFAULT_SAMPLES
    t_final: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"grid needs n >= 1 cells, got {self.n!r}")
        if not (math.isfinite(self.t_final) and self.t_final > 0):
            raise InvalidArgumentError(f"t_final must be positive, got {self.t_final!r}")

    @property
    def dt(self) -> float:
        return self.t_final / self.n

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dt


@dataclass(frozen=True)
class ShapeFunction:
    """Weight ``s(t) = sin(pi t / t_f) ** p``; ``p = 0`` gives the flat metric."""

    p: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 0):
            raise InvalidArgumentError(f"shape exponent must be >= 0, got {self.p!r}")

    def __call__(self, t, t_final):
        return shape_eval(self, t, t_final)

    def on(self, grid: TimeGrid) -> np.ndarray:
        if self.p == 0:
            return np.ones(grid.n)
        return np.sin(np.pi * grid.midpoints / grid.t_final) ** self.p


def shape_eval(shape: ShapeFunction, t, t_final: float):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > t_final) or not np.all(np.isfinite(t_arr)):
        raise InvalidArgumentError(f"t must lie in [0, {t_final}]")
    if shape.p == 0:
        out = np.ones_like(t_arr)
    else:
        # clip tiny negative sines at t == t_final
        out = np.clip(np.sin(np.pi * t_arr / t_final), 0.0, None) ** shape.p
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ControlField:
    grid: TimeGrid
    samples: np.ndarray
    shape: ShapeFunction = field(default_factory=ShapeFunction)

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float).reshape(-1)
        if arr.shape != (self.grid.n,):
            raise InvalidArgumentError(
                f"expected {self.grid.n} samples, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("control samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @classmethod
    def zeros(cls, grid: TimeGrid | None = None, shape: ShapeFunction | None = None):
        grid = grid or TimeGrid()
        return cls(grid, np.zeros(grid.n), shape or ShapeFunction())

    @classmethod
    def from_function(cls, func, grid: TimeGrid | None = None,
                      shape: ShapeFunction | None = None):
        grid = grid or TimeGrid()
        return cls(grid, func(grid.midpoints), shape or ShapeFunction())

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def dt(self) -> float:
        return self.grid.dt

    @property
    def times(self) -> np.ndarray:
        return self.grid.midpoints

    @property
    def weights(self) -> np.ndarray:
        """Shape function sampled at the midpoints."""
        return self.shape.on(self.grid)

    def with_samples(self, samples) -> "ControlField":
        return ControlField(self.grid, samples, self.shape)

    def compatible(self, other: "ControlField") -> bool:
        return self.grid == other.grid and self.shape == other.shape

    def __add__(self, other):
        _check_same_space(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        _check_same_space(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(self.samples * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_samples(-self.samples)

    def __eq__(self, other):
        if not isinstance(other, ControlField):
            return NotImplemented
        return self.compatible(other) and np.array_equal(self.samples, other.samples)

    __hash__ = None

    def __repr__(self):
        return (f"ControlField(n={self.n}, t_final={self.grid.t_final}, "
                f"p={self.shape.p}, max|C|={np.max(np.abs(self.samples)):.4g})")


def _check_same_space(f: ControlField, g: ControlField):
    if not f.compatible(g):
        raise GridMismatchError("control fields live on different grids or shapes")


def inner_product(f: ControlField, g: ControlField) -> float:
    """Midpoint rule for the weighted product  int f g / s dt."""
    _check_same_space(f, g)
    return float(np.sum(f.samples * g.samples / f.weights) * f.dt)


def norm(f: ControlField) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


def theta_profile(control: ControlField) -> np.ndarray:
    """Accumulated z rotation angle at each midpoint.

    ``theta[k] = dt * (C_0 + ... + C_{k-1} + C_k / 2)``, so the value at a
    midpoint includes the first half of its own cell.  Use
    :func:`rotation_angle` for the full-interval angle.
    """
    c = control.samples
    before = np.concatenate(([0.0], np.cumsum(c)[:-1]))
    return (before + 0.5 * c) * control.dt


def rotation_angle(control: ControlField) -> float:
    """theta(t_f; C), the total pulse area."""
    return float(np.sum(control.samples) * control.dt)


def fluence(control: ControlField) -> float:
    return float(np.sum(control.samples ** 2) * control.dt)


def _raised_cosine_profile(grid: TimeGrid, ramp_fraction: float) -> np.ndarray:
    t = grid.midpoints
    ramp = ramp_fraction * grid.t_final
    profile = np.ones(grid.n)
    rise = t < ramp
    fall = t > grid.t_final - ramp
    profile[rise] = 0.5 * (1.0 - np.cos(np.pi * t[rise] / ramp))
    profile[fall] = 0.5 * (1.0 - np.cos(np.pi * (grid.t_final - t[fall]) / ramp))
    return profile


def initial_square_pulse(area: float, grid: TimeGrid | None = None,
                         shape: ShapeFunction | None = None,
                         ramp_fraction: float = RAMP_FRACTION) -> ControlField:
    """Flat-top pulse with raised-cosine edges whose integral equals ``area``."""
    if not math.isfinite(area):
        raise InvalidArgumentError("pulse area must be finite")
    grid = grid or TimeGrid()
    profile = _raised_cosine_profile(grid, ramp_fraction)
    amplitude = area / (np.sum(profile) * grid.dt)
    return ControlField(grid, amplitude * profile, shape or ShapeFunction())
