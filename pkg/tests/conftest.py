import numpy as np
import pytest

from nsark import _kernels, orderlab, pds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["linear2", "nonlinear3"])
def smooth_problem(request):
    return pds.builtin(request.param)


@pytest.fixture(params=sorted(pds.BUILTINS))
def any_problem(request):
    return pds.builtin(request.param)


@pytest.fixture
def grid():
    return orderlab.geometric_grid()


BACKENDS = [pytest.param(_kernels.pure, id="python")]
if _kernels.compiled is not None:
    BACKENDS.insert(0, pytest.param(_kernels.compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_KEY]
