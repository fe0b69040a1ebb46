"""Robustness characterization over the drift strength epsilon.

Gate-distance sweeps feed the robustness integral R = int Delta d eps;
ensemble runs report state fidelities with Bloch vectors.  Every epsilon point is
independent; ``workers > 1`` fans contiguous chunks of the grid out to a
thread pool and joins the results back by index, so the output does not
depend on the pool size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .controls import ControlField
from .errors import InvalidArgumentError
from .objective import GateTarget, gate_distance
from .su2 import SIGMA_X, SIGMA_Y, SIGMA_Z, propagate_many

DEFAULT_RESOLUTION = 0.01
NORM_TOL = 1e-12

STATE_Z_PLUS = np.array([1.0, 0.0], dtype=complex)
STATE_Z_MINUS = np.array([0.0, 1.0], dtype=complex)
STATE_X_PLUS = (STATE_Z_PLUS + STATE_Z_MINUS) / math.sqrt(2)
STATE_X_MINUS = (STATE_Z_PLUS - STATE_Z_MINUS) / math.sqrt(2)

STATES = {
    "z+": STATE_Z_PLUS,
    "z-": STATE_Z_MINUS,
    "x+": STATE_X_PLUS,
    "x-": STATE_X_MINUS,
}


def parse_state(name: str) -> np.ndarray:
    try:
        return STATES[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown state {name!r}; use one of {sorted(STATES)}") from None


@dataclass(frozen=True)
class SweepResult:
    epsilon: np.ndarray
    delta: np.ndarray
    label: str = ""
    source: str = ""

    def rows(self):
        return zip(self.epsilon.tolist(), self.delta.tolist())


@dataclass(frozen=True)
class EnsembleStats:
    epsilon: np.ndarray
    fidelity: np.ndarray
    bloch: np.ndarray      # (M, 3)

    @property
    def min(self) -> float:
        return float(np.min(self.fidelity))

    @property
    def max(self) -> float:
        return float(np.max(self.fidelity))

    @property
    def mean(self) -> float:
        return float(np.mean(self.fidelity))

    @property
    def std(self) -> float:
        return float(np.std(self.fidelity))

    def summary(self) -> dict:
        return {"min": self.min, "max": self.max, "mean": self.mean, "std": self.std}

    def rows(self):
        for e, f, (x, y, z) in zip(self.epsilon.tolist(), self.fidelity.tolist(), self.bloch.tolist()):
            yield e, f, x, y, z


def _map_chunks(fn, values: np.ndarray, workers: int) -> np.ndarray:
    """Apply a batched ``fn`` to ``values`` split into contiguous chunks."""
    if workers < 1:
        raise InvalidArgumentError("workers must be >= 1")
    if workers == 1 or len(values) < 2:
        return fn(values)
    chunks = np.array_split(values, min(workers, len(values)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


def _propagate_each(control, eps):
    # one epsilon per batch row keeps each value independent of chunking
    return np.stack([propagate_many(control, [e])[0] for e in eps]) if len(eps) else np.empty((0, 2, 2), complex)


def epsilon_grid(eps_min: float, eps_max: float, resolution: float = DEFAULT_RESOLUTION) -> np.ndarray:
    """Inclusive uniform grid eps_min, eps_min + res, ..., eps_max."""
    if not all(math.isfinite(v) for v in (eps_min, eps_max, resolution)):
        raise InvalidArgumentError("sweep bounds must be finite")
    if not eps_min < eps_max:
        raise InvalidArgumentError("need eps_min < eps_max")
    if resolution <= 0:
        raise InvalidArgumentError("resolution must be positive")
    count = int(round((eps_max - eps_min) / resolution))
    if count < 1:
        raise InvalidArgumentError("resolution exceeds the sweep range")
    return eps_min + resolution * np.arange(count + 1)


def distances(control: ControlField, target: GateTarget, eps, workers: int = 1) -> np.ndarray:
    eps = np.asarray(eps, dtype=float).reshape(-1)
    unitaries = _map_chunks(lambda e: _propagate_each(control, e), eps, workers)
    return np.array([gate_distance(target, u) for u in unitaries])


def epsilon_sweep(control: ControlField, target: GateTarget, eps_min: float, eps_max: float,
                  resolution: float = DEFAULT_RESOLUTION, source: str = "",
                  workers: int = 1) -> SweepResult:
    eps = epsilon_grid(eps_min, eps_max, resolution)
    return SweepResult(eps, distances(control, target, eps, workers), target.label, source)


def robustness_R(control: ControlField, target: GateTarget, eps0: float, delta_eps: float,
                 resolution: float = DEFAULT_RESOLUTION, workers: int = 1) -> float:
    """Midpoint rule for int Delta(eps) d eps over [eps0 - delta_eps, eps0 + delta_eps]."""
    if not (delta_eps > 0 and math.isfinite(delta_eps)):
        raise InvalidArgumentError("delta_eps must be positive")
    if not (resolution > 0 and math.isfinite(resolution)):
        raise InvalidArgumentError("resolution must be positive")
    cells = max(1, int(round(2 * delta_eps / resolution)))
    h = 2 * delta_eps / cells
    eps = eps0 - delta_eps + h * (np.arange(cells) + 0.5)
    return float(np.sum(distances(control, target, eps, workers)) * h)


def _check_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (2,) or not np.all(np.isfinite(psi)):
        raise InvalidArgumentError("state must be a finite 2-vector")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise InvalidArgumentError("state is not normalized")
    return psi


def bloch_vector(state) -> tuple:
    """(<sigma_x>, <sigma_y>, <sigma_z>) of a normalized pure state."""
    psi = _check_state(state)
    return tuple(float(np.real(np.vdot(psi, s @ psi))) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))


def ensemble_state_fidelity(control: ControlField, initial, target_state, eps_list,
                            workers: int = 1) -> EnsembleStats:
    """Uhlmann fidelity |<target|U(eps)|initial>| for each ensemble member."""
    psi0 = _check_state(initial)
    goal = _check_state(target_state)
    eps = np.asarray(eps_list, dtype=float).reshape(-1)
    if eps.size == 0:
        raise InvalidArgumentError("ensemble needs at least one epsilon")
    if not np.all(np.isfinite(eps)):
        raise InvalidArgumentError("epsilon values must be finite")
    unitaries = _map_chunks(lambda e: _propagate_each(control, e), eps, workers)
    finals = unitaries @ psi0
    fid = np.minimum(np.abs(finals @ np.conj(goal)), 1.0)
    # renormalize away the last-bit drift before taking expectation values
    finals = finals / np.linalg.norm(finals, axis=1, keepdims=True)
    bloch = np.array([bloch_vector(psi) for psi in finals])
    return EnsembleStats(eps, fid, bloch)


def ensemble_grid(eps_min: float = 1.5, eps_max: float = 2.5, count: int = 21) -> np.ndarray:
    """``count`` equally spaced members spanning [eps_min, eps_max] inclusive."""
    if count < 1:
        raise InvalidArgumentError("count must be >= 1")
    if not eps_min <= eps_max:
        raise InvalidArgumentError("need eps_min <= eps_max")
    if count == 1:
        return np.array([float(eps_min)])
    return np.linspace(eps_min, eps_max, count)
