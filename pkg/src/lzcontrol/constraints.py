"""Decoupling-pulse constraint functionals and their gradients.

The five functionals act on the rotation-angle profile theta(t):

    zeta_1 = int sin(theta)            zeta_4 = int t sin(theta)
    zeta_2 = int cos(theta)            zeta_5 = int t cos(theta)
    zeta_3 = int int sin(theta(t1) - theta(t2)) sgn(t1 - t2)

All of them reduce to sums over cells of the complex moments

    A_k = int_cell exp(i theta) dt,     B_k = int_cell t exp(i theta) dt,

so zeta_3 costs O(N) through prefix sums of A_k.  With plain midpoint
quadrature A_k = dt exp(i theta_k).  A piecewise-constant control makes
theta exactly linear inside each cell; passing the cell slopes (``rates``)
integrates that linear profile exactly.  The exact form is what the
propagator sees, so a control with eta_r = 0 under it cancels the first
and second order drift terms of the discretized dynamics exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .controls import ControlField, TimeGrid, theta_profile
from .errors import InvalidArgumentError

REDUCED = (0, 1, 2)
FULL = (0, 1, 2, 3, 4)
QUADRATURES = ("exact", "midpoint")

_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 14


@dataclass(frozen=True)
class ConstraintVector:
    eta: tuple

    @property
    def reduced(self) -> np.ndarray:
        return np.asarray(self.eta[:3])

    @property
    def reduced_norm(self) -> float:
        return float(np.linalg.norm(self.reduced))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.eta))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.eta, dtype=dtype)

    def to_dict(self):
        return {"eta": [float(x) for x in self.eta], "eta_r_norm": self.reduced_norm}


# Cell factors.  With x = rate * dt / 2 and y = rate * dt:
#   sinc(x) = sin x / x
#   q(x)    = (sin x - x cos x) / x^2     (first moment of exp(i rate u))
#   r(y)    = (y - sin y) / y^2           (same-cell part of zeta_3)
# Series are used near zero where the closed forms cancel.

def _odd_series(coeffs, x):
    """sum_n c_n x^(2n+1) and its derivative, for |x| small."""
    x2 = x * x
    val = np.zeros_like(x)
    der = np.zeros_like(x)
    for n in reversed(range(len(coeffs))):
        val = val * x2 + coeffs[n]
        der = der * x2 + (2 * n + 1) * coeffs[n]
    return val * x, der


_SINC_C = [(-1) ** n / factorial(2 * n + 1) for n in range(_SERIES_TERMS)]
_Q_C = [(-1) ** n * 2 * (n + 1) / factorial(2 * n + 3) for n in range(_SERIES_TERMS)]
_R_C = [(-1) ** n / factorial(2 * n + 3) for n in range(_SERIES_TERMS)]


def _blend(x, small, large):
    mask = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(mask, x, 0.0)
    xl = np.where(mask, 1.0, x)
    sv, sd = small(xs)
    lv, ld = large(xl)
    return np.where(mask, sv, lv), np.where(mask, sd, ld)


def _sinc(x):
    def small(x):
        # even function: evaluate x * sinc(x) as odd series then divide
        x2 = x * x
        val = np.zeros_like(x)
        der = np.zeros_like(x)
        for n in reversed(range(_SERIES_TERMS)):
            val = val * x2 + _SINC_C[n]
            if n:
                der = der * x2 + 2 * n * _SINC_C[n]
        return val, der * x

    def large(x):
        s, c = np.sin(x), np.cos(x)
        return s / x, (x * c - s) / (x * x)

    return _blend(x, small, large)


def _q(x):
    def large(x):
        s, c = np.sin(x), np.cos(x)
        q = (s - x * c) / (x * x)
        return q, s / x - 2 * q / x

    return _blend(x, lambda x: _odd_series(_Q_C, x), large)


def _r(y):
    def large(y):
        r = (y - np.sin(y)) / (y * y)
        return r, (1 - np.cos(y)) / (y * y) - 2 * r / y

    return _blend(y, lambda y: _odd_series(_R_C, y), large)


@dataclass
class _Moments:
    a: np.ndarray          # int_cell exp(i theta)
    b: np.ndarray          # int_cell t exp(i theta)
    diag: np.ndarray       # same-cell contribution to zeta_3
    da: np.ndarray         # d a / d x   (x = rate dt / 2)
    db: np.ndarray
    ddiag: np.ndarray


def _moments(theta, grid: TimeGrid, rates=None) -> _Moments:
    h = grid.dt
    t = grid.midpoints
    phase = np.exp(1j * np.asarray(theta, dtype=float))
    if rates is None:
        zero = np.zeros(grid.n)
        a = h * phase
        return _Moments(a, t * a, zero, 0 * a, 0 * a, zero)
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (grid.n,):
        raise InvalidArgumentError("rates must have one entry per cell")
    x = 0.5 * h * rates
    sinc, dsinc = _sinc(x)
    q, dq = _q(x)
    r, dr = _r(2 * x)
    a = h * sinc * phase
    da = h * dsinc * phase
    b = t * a + 0.5j * h * h * q * phase
    db = t * da + 0.5j * h * h * dq * phase
    return _Moments(a, b, 2 * h * h * r, da, db, 4 * h * h * dr)


def _exclusive_cumsum(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    np.cumsum(x[:-1], out=out[1:])
    return out


def _zeta_from_moments(m: _Moments) -> np.ndarray:
    before = _exclusive_cumsum(m.a)
    z3 = 2.0 * np.sum((m.a * np.conj(before)).imag) + np.sum(m.diag)
    sa, sb = np.sum(m.a), np.sum(m.b)
    return np.array([sa.imag, sa.real, z3, sb.imag, sb.real])


def zeta(theta, grid: TimeGrid, rates=None) -> np.ndarray:
    """The five functionals for theta sampled at the grid midpoints.

    Without ``rates`` this is the midpoint rule.  With the per-cell slopes
    d theta / dt the linear profile inside each cell is integrated exactly.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (grid.n,):
        raise InvalidArgumentError("theta must have one entry per cell")
    return _zeta_from_moments(_moments(theta, grid, rates))


def _rates_for(control: ControlField, quadrature: str):
    if quadrature not in QUADRATURES:
        raise InvalidArgumentError(f"unknown quadrature {quadrature!r}")
    return control.samples if quadrature == "exact" else None


def eta(control: ControlField, quadrature: str = "exact") -> ConstraintVector:
    z = zeta(theta_profile(control), control.grid, _rates_for(control, quadrature))
    return ConstraintVector(tuple(float(v) for v in z))


def eta_reduced_norm(control: ControlField, quadrature: str = "exact") -> float:
    return eta(control, quadrature).reduced_norm


def eta_derivative_profiles(control: ControlField, quadrature: str = "exact") -> np.ndarray:
    """Unweighted derivatives d eta_i / d C(t) at the midpoints, shape (5, N).

    For the midpoint rule these are the tail integrals
    int_t^{t_f} d zeta_i / d theta(tau) d tau; the exact rule adds the
    dependence of cell k's own moments on C_k.
    """
    m = _moments(theta_profile(control), control.grid, _rates_for(control, quadrature))
    before = _exclusive_cumsum(m.a)
    after = np.sum(m.a) - before - m.a
    # d zeta / d theta_k  (theta_k shifts the phase of cell k)
    d_theta = np.stack([
        m.a.real,
        -m.a.imag,
        2.0 * (np.conj(m.a) * (before - after)).real,
        m.b.real,
        -m.b.imag,
    ])
    # d zeta / d x_k  (x_k = C_k dt / 2 reshapes cell k)
    d_x = np.stack([
        m.da.imag,
        m.da.real,
        2.0 * (m.da * np.conj(before)).imag + 2.0 * (after * np.conj(m.da)).imag + m.ddiag,
        m.db.imag,
        m.db.real,
    ])
    # theta_k = dt (C_0 + ... + C_{k-1} + C_k / 2)
    tail = np.cumsum(d_theta[:, ::-1], axis=1)[:, ::-1] - 0.5 * d_theta
    return tail + 0.5 * d_x


def grad_eta(control: ControlField, indices=FULL, weighted: bool = True,
             quadrature: str = "exact"):
    """Gradients of the selected eta components as control fields.

    With ``weighted`` (the default) the profiles are multiplied by s(t),
    giving representatives under the weighted inner product that the
    objective gradient also uses.
    """
    prof = eta_derivative_profiles(control, quadrature)[list(indices)]
    if weighted:
        prof = prof * control.weights
    return [control.with_samples(p) for p in prof]
