import numpy as np
import pytest

from imgmps.imageio import ImageGrid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_grid(n, rng):
    return ImageGrid(n, rng.random((1 << n, 1 << n)))


def random_state(m, rng):
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return v / np.linalg.norm(v)


# acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    """Register the one-line verdict printed at the end of the session."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
