"""Removal of constraint-gradient components from a search direction.

Given constraint gradients g_1..g_m and a direction d, the projected
direction is

    d - sum_i g_i x_i,    G x = q,   G_ij = <g_i, g_j>,   q_i = <d, g_i>,

which is orthogonal to every g_i in the weighted control-space metric.
G is factored with a symmetric eigendecomposition so its conditioning is
checked explicitly; a (numerically) singular G means the constraint
gradients are linearly dependent and the control sits at a critical point
of the constraint map.
"""

from __future__ import annotations

import numpy as np

from .controls import ControlField, inner_product
from .errors import CriticalPointError, GridMismatchError

CRITICAL_RATIO = 1e-12


def _stack(grads):
    first = grads[0]
    for g in grads[1:]:
        if not first.compatible(g):
            raise GridMismatchError("constraint gradients live on different grids")
    return np.stack([g.samples for g in grads])


def gramian(grads) -> np.ndarray:
    m = len(grads)
    out = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            out[i, j] = out[j, i] = inner_product(grads[i], grads[j])
    return out


def solve_gramian(gram: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve G x = q, refusing near-singular G."""
    evals, evecs = np.linalg.eigh(gram)
    top = evals[-1]
    if top <= 0 or evals[0] < CRITICAL_RATIO * top:
        raise CriticalPointError(
            "constraint gradients are linearly dependent "
            f"(eigenvalue ratio {evals[0] / top if top > 0 else 0.0:.3e})"
        )
    x = evecs @ ((evecs.T @ q) / evals)
    # one refinement sweep keeps ||G x - q|| at round-off level
    x += evecs @ ((evecs.T @ (q - gram @ x)) / evals)
    return x


def project_gradient(direction: ControlField, grads) -> ControlField:
    """Component of ``direction`` orthogonal to all ``grads``."""
    if not grads:
        return direction
    basis = _stack(grads)
    if not direction.compatible(grads[0]):
        raise GridMismatchError("direction and constraint gradients differ in grid")
    scaled = basis / direction.weights * direction.dt
    gram = gramian(grads)
    out = direction.samples
    # projecting twice removes the round-off left by an ill-conditioned G
    for _ in range(2):
        out = out - solve_gramian(gram, scaled @ out) @ basis
    return direction.with_samples(out)
