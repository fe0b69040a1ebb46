import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lzcontrol import (Z_PI, Z_PI_2, ControlField, ObjectiveConfig, TimeGrid,
                       initial_square_pulse, optimize_hybrid, optimize_oct, synth_dp)

settings.register_profile(
    "lz", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lz")

TARGETS = {"z_pi_2": Z_PI_2, "z_pi": Z_PI}
EPSILONS = (0, 1, 2, 3, 4, 5)

ACCEPTANCE_LINES = []


def smooth_control(n=1024, seed=0, amplitude=3.0, modes=6, t_final=1.0):
    """Deterministic random Fourier-sine control."""
    rng = np.random.default_rng(seed)
    grid = TimeGrid(n, t_final)
    t = grid.midpoints / t_final
    coef = rng.normal(size=modes) / np.arange(1, modes + 1)
    c = amplitude * sum(a * np.sin((k + 1) * math.pi * t) for k, a in enumerate(coef))
    return ControlField(grid, c)


class _Cache:
    """Optimization results shared across test modules (computed lazily)."""

    def __init__(self):
        self._store = {}

    def _get(self, key, fn):
        if key not in self._store:
            self._store[key] = fn()
        return self._store[key]

    def dp(self, name):
        return self._get(("dp", name), lambda: synth_dp(TARGETS[name].phi))

    def oct(self, name, e0):
        target = TARGETS[name]
        return self._get(("oct", name, e0), lambda: optimize_oct(
            initial_square_pulse(target.phi), target, ObjectiveConfig(epsilon0=e0)))

    def hybrid(self, name, e0):
        target = TARGETS[name]
        return self._get(("hyb", name, e0), lambda: optimize_hybrid(
            self.dp(name), target, ObjectiveConfig(epsilon0=e0)))


@pytest.fixture(scope="session")
def runs():
    return _Cache()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
