import numpy as np
import pytest

from levpivot.leverage import probability_ceiling

# (criterion number, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_LINES = []


def random_probs(n, k, gen):
    """Valid inclusion probabilities of total mass ``k`` over ``n`` rows."""
    raw = gen.uniform(0.05, 1.0, n)
    return probability_ceiling(raw * k / raw.sum(), k).probs


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
