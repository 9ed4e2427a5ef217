import time

import numpy as np
import pytest

from qstein.divergences import make_pair

ACCEPTANCE = {}
_START = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def coin():
    return make_pair(np.diag([0.75, 0.25]), np.diag([0.5, 0.5]))


@pytest.fixture
def qubit_pair(rng):
    from qstein.sampling import random_pair

    return make_pair(*random_pair(rng, 2))


def pytest_sessionstart(session):
    _START.append(time.perf_counter())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    elapsed = time.perf_counter() - _START[0]
    terminalreporter.write_line(f"session runtime {elapsed:.1f} s (limit 300 s)")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
