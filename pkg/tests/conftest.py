import time

import numpy as np
import pytest

from nady.core import M_PROTON, build_system

_ACCEPTANCE = {}
_RUNS = {}


def record_criterion(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}"
    _ACCEPTANCE[number] = line
    print(line)
    return ok


def builtin_run(name):
    """Run a built-in scenario once per session (in memory) and share it."""
    from nady.scenarios import builtin_config, run_scenario

    if name not in _RUNS:
        t0 = time.perf_counter()
        res = run_scenario(builtin_config(name), write=False)
        res.elapsed = time.perf_counter() - t0
        _RUNS[name] = res
    return _RUNS[name]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])


@pytest.fixture
def hydrogen():
    return build_system([(M_PROTON, 1), (1.0, -1)])


@pytest.fixture
def helium():
    return build_system([(4 * M_PROTON, 2), (1.0, -1), (1.0, -1)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
