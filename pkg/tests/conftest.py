import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from llbm.sweep import random_support_difference, random_zonotope, trial_rng

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=4)


def rng_for(seed, *keys):
    return trial_rng(seed, *keys)


def random_pair(seed, n, extra=2):
    """Full-dimensional K with n..n+extra generators and a random support difference."""
    rng = rng_for(seed, n)
    K = random_zonotope(rng, n, n + int(rng.integers(0, extra + 1)))
    return K, random_support_difference(rng, n), rng


# Acceptance lines collected by tests/test_acceptance.py.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[2:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def acceptance_line():
    def record(key, ok, detail):
        ACCEPTANCE_LINES[key] = f"{key.upper()} {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[key])
    return record
