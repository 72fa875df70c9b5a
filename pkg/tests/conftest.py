import numpy as np
import pytest

from hardysobolev.boundary import sample_boundary
from hardysobolev.gallery import inverse_power_stack
from hardysobolev.hardy_sobolev import HardySobolevElement
from hardysobolev.numerics import make_halfline_grid, make_real_grid


@pytest.fixture(scope="session")
def grid():
    return make_real_grid(200.0, 2**16)


@pytest.fixture(scope="session")
def small_grid():
    return make_real_grid(100.0, 2**14)


@pytest.fixture(scope="session")
def hl():
    return make_halfline_grid("gauss-laguerre", 128)


@pytest.fixture(scope="session")
def F_sq(grid):
    """Element with boundary trace 1/(x+i)^2, n = 2."""
    return HardySobolevElement.from_boundary(sample_boundary(inverse_power_stack(1.0, 2, 2), grid, 2.0))


def lorentz(x):
    return 1.0 / (1.0 + x * x)


def gauss(x):
    return np.exp(-x * x)


# --- acceptance report ----------------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """``acceptance(number, passed, detail)`` records one criterion line."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
