from __future__ import annotations

import numpy as np
import pytest

from crinkle.levy_core import StablePower, sample_jumps

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[0.3, 0.5, 0.7])
def stable(request):
    return StablePower(request.param)


@pytest.fixture
def jumps(rng):
    return sample_jumps(StablePower(0.5), 1.0, 1e-3, rng)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
