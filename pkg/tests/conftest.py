import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_diagram(rng, k, lo=0.0, hi=1.0):
    b = rng.uniform(lo, hi, size=k)
    return np.c_[b, b + rng.uniform(0.01, hi - lo, size=k)]


ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""
    def record(tag, ok, detail):
        line = f"{tag}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
