import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_walsh(values, n):
    """Walsh coefficients by direct summation over the cube (reference oracle)."""
    values = np.asarray(values, dtype=float).reshape(1 << n, -1)
    N = 1 << n
    out = np.zeros_like(values)
    for A in range(N):
        for e in range(N):
            sign = -1.0 if bin(A & e).count("1") % 2 else 1.0
            out[A] += sign * values[e]
    return out / N


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary table."""

    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        assert ok, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
