import math
from functools import lru_cache

import numpy as np
import pytest

from adsksurf.barrier_family import barrier_surface
from adsksurf.suites import window_axes

THETAS = (math.pi / 3, math.pi / 2, 2 * math.pi / 3)
# window on which h = 5e-3 differences resolve the barrier to ~1e-4
S_WIN = (-0.25, 0.25)
T_WIN = (-0.88, -0.72)


@lru_cache(maxsize=None)
def barrier_case(theta, h=5e-3, s_win=S_WIN, t_win=T_WIN):
    s = window_axes(s_win, h)
    t = window_axes(t_win, h)
    return barrier_surface(theta, s, t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sl2(rng, spread=2.0):
    from adsksurf.suites import random_isometry
    return random_isometry(rng, spread=spread)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record(num, ok, text):
    ACCEPTANCE[num] = (bool(ok), text)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {text}")
