import numpy as np
import pytest

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion.

    Usage: ``criterion(number, title, passed, detail)``; the assertion is
    made by the caller so failures still show a traceback.
    """
    def record(number, title, passed, detail=""):
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        _ACCEPTANCE.append(f"[{status}] {number:>2}. {title}" + (f" -- {detail}" if detail else ""))
        return passed
    return record


def two_sine_series(n=2000, noise=0.01, seed=0, level=1000.0):
    """Daily + weekly sinusoids around ``level`` with Gaussian noise of
    ``noise * level`` standard deviation."""
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    x = (level + 0.2 * level * np.sin(2 * np.pi * t / 24)
         + 0.1 * level * np.sin(2 * np.pi * t / 168))
    return x + rng.normal(0.0, noise * level, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
