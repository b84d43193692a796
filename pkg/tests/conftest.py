import numpy as np
import pytest

from rkenergy.methods import builtin

METHOD_NAMES = (
    "euler-backward", "crank-nicolson", "qin-zhang", "kraaijevanger-spijker",
    "pade:0,3", "pade:4,1", "pade:1,2", "pade:2,2", "pade:3,3", "pade:4,4",
    "taylor:1", "taylor:2", "taylor:3", "taylor:4",
)


@pytest.fixture(params=METHOD_NAMES)
def method(request):
    return builtin(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


CRITERIA = 14


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    results = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for n in range(1, CRITERIA + 1):
        if n in results:
            passed, title, detail = results[n]
            status = "PASS" if passed else "FAIL"
            terminalreporter.write_line(f"[{status}] {n:2d}. {title} ({detail})")
        else:
            terminalreporter.write_line(f"[----] {n:2d}. not run")
