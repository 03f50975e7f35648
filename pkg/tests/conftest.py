import numpy as np
import pytest

from rislink.numerics import RngStream


@pytest.fixture
def stream():
    return RngStream(20240611)


@pytest.fixture
def gen():
    return np.random.default_rng(1234)


# One pass/fail line per acceptance criterion, aggregated over the tests whose
# names start with ``test_criterion<k>_``.
_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion"):
        return
    if report.when == "call" or report.failed:
        key = int(name[len("test_criterion"):].split("_", 1)[0])
        ok = _CRITERIA.get(key, True) and report.passed
        _CRITERIA[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {key}: {'PASS' if _CRITERIA[key] else 'FAIL'}")
