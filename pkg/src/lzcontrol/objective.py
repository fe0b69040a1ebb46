"""Gate distance, fidelity, the regularized objective and its gradient."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controls import ControlField, ShapeFunction
from .errors import InvalidArgumentError, UndefinedPhaseError
from .su2 import SZ, dagger, propagate, trajectory_and_final, z_rotation

DIM = 2
DEFAULT_ALPHA = 1e-6
DELTA_FLOOR = 1e-9
PHASE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GateTarget:
    matrix: np.ndarray
    label: str = "custom"
    phi: float | None = None

    def __post_init__(self):
        v = np.array(self.matrix, dtype=complex)
        if v.shape != (2, 2):
            raise InvalidArgumentError("target must be a 2x2 matrix")
        if np.max(np.abs(dagger(v) @ v - np.eye(2))) > 1e-12:
            raise InvalidArgumentError("target matrix is not unitary")
        v.flags.writeable = False
        object.__setattr__(self, "matrix", v)

    @classmethod
    def z(cls, phi: float, label: str | None = None) -> "GateTarget":
        return cls(z_rotation(phi), label or f"angle:{phi!r}", float(phi))

    def __repr__(self):
        return f"GateTarget({self.label})"


Z_PI_2 = GateTarget.z(math.pi / 2, "z_pi_2")
Z_PI = GateTarget.z(math.pi, "z_pi")


def parse_target(name: str) -> GateTarget:
    """``z_pi_2``, ``z_pi`` or ``angle:<radians>``."""
    if name == "z_pi_2":
        return Z_PI_2
    if name == "z_pi":
        return Z_PI
    if name.startswith("angle:"):
        try:
            phi = float(name.split(":", 1)[1])
        except ValueError:
            raise InvalidArgumentError(f"bad target angle in {name!r}") from None
        if not math.isfinite(phi):
            raise InvalidArgumentError(f"bad target angle in {name!r}")
        return GateTarget.z(phi, name)
    raise InvalidArgumentError(f"unknown target {name!r}")


def target_angle(target: GateTarget) -> float:
    if target.phi is None:
        raise InvalidArgumentError(f"{target!r} is not a z rotation")
    return target.phi


@dataclass(frozen=True)
class ObjectiveConfig:
    alpha: float = DEFAULT_ALPHA
    shape: ShapeFunction = field(default_factory=ShapeFunction)
    epsilon0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise InvalidArgumentError(f"alpha must be >= 0, got {self.alpha!r}")
        if not math.isfinite(self.epsilon0):
            raise InvalidArgumentError("epsilon0 must be finite")


def _as_matrix(v) -> np.ndarray:
    return v.matrix if isinstance(v, GateTarget) else np.asarray(v)


def fidelity(v, u) -> float:
    """|Tr(V^dag U)| / n, invariant under global phases."""
    v, u = _as_matrix(v), _as_matrix(u)
    return float(min(abs(np.trace(dagger(v) @ u)) / DIM, 1.0))


def infidelity(v, u) -> float:
    """1 - F evaluated without cancellation.

    W = V^dag U is split as exp(i g) S with S in SU(2).  Then
    |Tr W| / 2 = |cos(w/2)| and sin^2(w/2) is read off the off-identity
    part of S, so 1 - F = sin^2 / (1 + |cos|) keeps full relative
    precision when U is close to the target and full absolute precision
    when it is far from it.
    """
    w = dagger(_as_matrix(v)) @ _as_matrix(u)
    det = w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]
    s = w * np.exp(-0.5j * np.angle(det))
    sin2 = 0.5 * (abs(s[0, 1]) ** 2 + abs(s[1, 0]) ** 2) + (0.5 * (s[0, 0] - s[1, 1]).imag) ** 2
    sin2 = min(max(float(sin2), 0.0), 1.0)
    cos_abs = min(abs(s[0, 0] + s[1, 1]) / 2, 1.0)
    return sin2 / (1.0 + cos_abs)


def gate_distance(v, u) -> float:
    """sqrt(1 - F); the phase-minimized Hilbert-Schmidt distance."""
    return math.sqrt(infidelity(v, u))


def penalty(control: ControlField, alpha: float) -> float:
    return 0.5 * alpha * float(np.sum(control.samples ** 2 / control.weights) * control.dt)


def objective_J(control: ControlField, target: GateTarget, cfg: ObjectiveConfig) -> float:
    u_final = propagate(control, cfg.epsilon0)
    return gate_distance(target, u_final) + penalty(control, cfg.alpha)


def grad_J(control: ControlField, target: GateTarget, cfg: ObjectiveConfig) -> ControlField:
    """Riesz representative of dJ/dC under the weighted inner product.

    Raises :class:`UndefinedPhaseError` when Tr(V^dag U_f) is numerically
    zero.  Below ``DELTA_FLOOR`` the distance term is treated as converged
    and only ``alpha * C`` is returned.
    """
    traj, u_final = trajectory_and_final(control, cfg.epsilon0)
    return _grad_from_trajectory(control, target, cfg.alpha, traj, u_final)


def _grad_from_trajectory(control, target, alpha, traj, u_final) -> ControlField:
    v = target.matrix
    tr = np.trace(dagger(v) @ u_final)
    if abs(tr) < PHASE_TOL:
        raise UndefinedPhaseError(
            "Tr(V^dag U_f) vanished; perturb the control to fix the global phase"
        )
    delta = gate_distance(v, u_final)
    out = alpha * control.samples
    if delta < DELTA_FLOOR:
        return control.with_samples(out)
    r = np.exp(1j * np.angle(tr)) * v
    m = dagger(u_final) @ r - dagger(r) @ u_final
    # Tr(M U^dag S_z U) for each midpoint, without forming the products
    x = dagger(traj) @ SZ @ traj
    tr_t = np.einsum("ij,kji->k", m, x)
    distance_part = control.weights / (4 * DIM * delta) * tr_t.imag
    return control.with_samples(distance_part + out)
