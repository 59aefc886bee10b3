import math

import pytest


def rel_err(got, want):
    if got == want:
        return 0.0
    return abs(got - want) / max(abs(want), 1e-300)


@pytest.fixture
def approx_rel():
    def check(got, want, tol):
        assert rel_err(got, want) <= tol, f"{got!r} vs {want!r}"
    return check


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running simulation sweeps")
