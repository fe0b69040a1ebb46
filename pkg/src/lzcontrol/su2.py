"""Closed-form SU(2) kernels for H(t) = eps * S_x + C(t) * S_z.

Each cell of the time grid contributes the exact exponential of the
midpoint Hamiltonian.  Ordered products are formed by pairwise (tree)
reduction, which keeps round-off growth logarithmic in the number of
steps and vectorizes over any leading batch axes (used for epsilon sweeps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controls import ControlField
from .errors import InvalidArgumentError

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SX, SY, SZ = SIGMA_X / 2, SIGMA_Y / 2, SIGMA_Z / 2


@dataclass(frozen=True)
class HamiltonianParams:
    epsilon: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise InvalidArgumentError("epsilon must be finite")

    def hamiltonian(self, c: float) -> np.ndarray:
        return self.epsilon * SX + c * SZ


def _epsilon(value) -> float:
    eps = value.epsilon if isinstance(value, HamiltonianParams) else float(value)
    if not math.isfinite(eps):
        raise InvalidArgumentError("epsilon must be finite")
    return eps


def su2_exp_batch(ax, ay, az) -> np.ndarray:
    """exp(-i (a . S)) for broadcastable component arrays; shape (..., 2, 2)."""
    ax, ay, az = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (ax, ay, az)))
    mag = np.sqrt(ax * ax + ay * ay + az * az)
    half = 0.5 * mag
    c = np.cos(half)
    # sin(|a|/2)/|a| with the |a| -> 0 limit of 1/2
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(mag > 0, np.sin(half) / np.where(mag > 0, mag, 1.0), 0.5)
    out = np.empty(ax.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * k * az
    out[..., 1, 1] = c + 1j * k * az
    out[..., 0, 1] = -1j * k * ax - k * ay
    out[..., 1, 0] = -1j * k * ax + k * ay
    return out


def su2_exp(ax: float, ay: float, az: float) -> np.ndarray:
    """exp(-i (ax S_x + ay S_y + az S_z)) as a 2x2 complex array."""
    if not all(math.isfinite(float(a)) for a in (ax, ay, az)):
        raise InvalidArgumentError("rotation vector must be finite")
    return su2_exp_batch(ax, ay, az)


def z_rotation(phi: float) -> np.ndarray:
    """Z_phi = diag(exp(-i phi/2), exp(i phi/2))."""
    return su2_exp(0.0, 0.0, phi)


def _to_su2(p: np.ndarray) -> np.ndarray:
    """Nearest matrix of the form [[a, b], [-b*, a*]] with |a|^2 + |b|^2 = 1.

    Products of SU(2) factors stay in SU(2); re-imposing the structure stops
    the per-step determinant bias from compounding over long products.
    """
    a = 0.5 * (p[..., 0, 0] + np.conj(p[..., 1, 1]))
    b = 0.5 * (p[..., 0, 1] - np.conj(p[..., 1, 0]))
    scale = 1.0 / np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
    a, b = a * scale, b * scale
    out = np.empty_like(p)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = -np.conj(b)
    out[..., 1, 1] = np.conj(a)
    return out


def ordered_product(steps: np.ndarray) -> np.ndarray:
    """Time-ordered product A_{N-1} ... A_1 A_0 of SU(2) factors over axis -3."""
    a = steps
    while a.shape[-3] > 1:
        m = a.shape[-3]
        pairs = _to_su2(a[..., 1:m - m % 2:2, :, :] @ a[..., 0:m - m % 2:2, :, :])
        if m % 2:
            pairs = np.concatenate([pairs, a[..., -1:, :, :]], axis=-3)
        a = pairs
    return a[..., 0, :, :]


def prefix_products(steps: np.ndarray) -> np.ndarray:
    """P[k] = A_k ... A_0 for every k (Hillis-Steele scan over axis -3, SU(2) factors)."""
    p = np.array(steps, copy=True)
    shift = 1
    n = p.shape[-3]
    while shift < n:
        p[..., shift:, :, :] = _to_su2(p[..., shift:, :, :] @ p[..., :n - shift, :, :])
        shift *= 2
    return p


def step_unitaries(control: ControlField, epsilon, fraction: float = 1.0) -> np.ndarray:
    """Per-cell propagators exp(-i fraction*dt*(eps S_x + C_k S_z)).

    ``epsilon`` may be an array, in which case a leading batch axis is added.
    """
    eps = np.asarray(epsilon, dtype=float)
    h = fraction * control.dt
    c = control.samples
    if eps.ndim:
        return su2_exp_batch(h * eps[:, None], 0.0, h * c[None, :])
    return su2_exp_batch(h * float(eps), 0.0, h * c)


def propagate(control: ControlField, epsilon=0.0) -> np.ndarray:
    """Final-time propagator U(t_f; C)."""
    return ordered_product(step_unitaries(control, _epsilon(epsilon)))


def propagate_many(control: ControlField, epsilons) -> np.ndarray:
    """U(t_f; C) for every epsilon in ``epsilons``; shape (M, 2, 2)."""
    eps = np.asarray(epsilons, dtype=float).reshape(-1)
    if not np.all(np.isfinite(eps)):
        raise InvalidArgumentError("epsilon values must be finite")
    return ordered_product(step_unitaries(control, eps))


def trajectory(control: ControlField, epsilon=0.0) -> np.ndarray:
    """U at every midpoint t_k, shape (N, 2, 2).

    U(t_k) is the product of the k completed cells followed by a half cell
    with the k-th sample.
    """
    eps = _epsilon(epsilon)
    full = prefix_products(step_unitaries(control, eps))
    half = step_unitaries(control, eps, fraction=0.5)
    out = half.copy()
    out[1:] = half[1:] @ full[:-1]
    return out


def trajectory_and_final(control: ControlField, epsilon=0.0):
    """Midpoint trajectory plus U(t_f), sharing one prefix scan."""
    eps = _epsilon(epsilon)
    full = prefix_products(step_unitaries(control, eps))
    half = step_unitaries(control, eps, fraction=0.5)
    out = half.copy()
    out[1:] = half[1:] @ full[:-1]
    return out, full[-1]


def dagger(u: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(u, -1, -2))


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(u) @ u - IDENTITY)))
