import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import smooth_control
from lzcontrol import (ControlField, CriticalPointError, GridMismatchError, TimeGrid, grad_eta,
                       gramian, inner_product, norm, project_gradient)
from lzcontrol.constraints import FULL, REDUCED
from lzcontrol.projection import solve_gramian


def rough_field(n, seed):
    rng = np.random.default_rng(seed)
    return ControlField(TimeGrid(n), rng.normal(size=n))


@pytest.fixture(scope="module")
def dp_grads(runs):
    return grad_eta(runs.dp("z_pi_2"), REDUCED)


def test_gramian_orthonormal_is_identity():
    g = TimeGrid(256)
    s = ControlField(g, np.ones(256)).weights
    # sqrt(2 s) sin(k pi t) is orthonormal under int f g / s on the midpoint grid
    basis = [ControlField(g, np.sqrt(2) * np.sin(k * math.pi * g.midpoints) * np.sqrt(s))
             for k in (1, 2, 3)]
    gram = gramian(basis)
    assert np.allclose(gram, np.eye(3), atol=1e-12)


def test_gramian_dependent_rows():
    f = smooth_control(128, 1)
    gram = gramian([f, 2 * f])
    assert abs(np.linalg.det(gram)) <= 1e-12 * np.trace(gram) ** 2
    with pytest.raises(CriticalPointError):
        project_gradient(smooth_control(128, 2), [f, 2 * f])


@given(st.integers(0, 10_000))
def test_gramian_symmetric_psd(seed):
    grads = [smooth_control(128, seed + k) for k in range(5)]
    gram = gramian(grads)
    assert np.array_equal(gram, gram.T)
    assert np.min(np.linalg.eigvalsh(gram)) >= -1e-12 * np.trace(gram)


@given(st.integers(0, 10_000))
def test_solve_residual(seed):
    grads = [smooth_control(256, seed + k) for k in range(3)]
    gram = gramian(grads)
    q = np.random.default_rng(seed).normal(size=3)
    x = solve_gramian(gram, q)
    assert np.linalg.norm(gram @ x - q) <= 1e-10 * np.linalg.norm(q)


def test_empty_constraint_set_is_identity():
    f = smooth_control(64, 1)
    assert project_gradient(f, []) is f


def test_grid_mismatch():
    with pytest.raises(GridMismatchError):
        project_gradient(smooth_control(64, 1), [smooth_control(32, 2)])


def _check_projection(d, grads):
    out = project_gradient(d, grads)
    nout = norm(out)
    for g in grads:
        assert abs(inner_product(out, g)) <= 1e-10 * nout * norm(g)
    again = project_gradient(out, grads)
    assert norm(again - out) <= 1e-12 * nout
    assert nout <= norm(d) * (1 + 1e-12)
    return out


@settings(max_examples=100)
@given(st.integers(0, 2 ** 32 - 1))
def test_projection_properties_on_random_fields(dp_grads, seed):
    d = rough_field(1024, seed) if seed % 2 else smooth_control(1024, seed)
    _check_projection(d, dp_grads)


@settings(max_examples=100)
@given(st.integers(0, 2 ** 32 - 1))
def test_projection_annihilates_span(dp_grads, seed):
    chi = np.random.default_rng(seed).normal(size=3)
    d = sum((c * g for c, g in zip(chi, dp_grads[1:])), chi[0] * dp_grads[0])
    assert norm(project_gradient(d, dp_grads)) <= 1e-10 * norm(d)


@given(st.integers(0, 10_000))
def test_projection_fixes_orthogonal_inputs(dp_grads, seed):
    d = project_gradient(rough_field(1024, seed), dp_grads)
    out = project_gradient(d, dp_grads)
    assert np.max(np.abs(out.samples - d.samples)) <= 1e-12 * np.max(np.abs(d.samples))


@given(st.integers(0, 10_000))
def test_projection_full_constraints_random_controls(seed):
    c = smooth_control(512, seed, amplitude=20.0)
    _check_projection(rough_field(512, seed + 1), grad_eta(c, FULL))
