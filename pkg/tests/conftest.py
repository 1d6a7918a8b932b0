import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lrconn.idempotents import preset_russel, preset_sphere  # noqa: E402

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def sphere():
    return preset_sphere()


@pytest.fixture(scope="session")
def russel():
    return preset_russel()


@pytest.fixture(scope="session")
def sphere_ring(sphere):
    return sphere.ring


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split(marker, 1)[1]
        num = int(name.split("_", 1)[0])
        _criteria[num] = (name.split("_", 1)[1], "PASS" if report.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        label, status = _criteria[num]
        terminalreporter.write_line(f"{status} criterion {num:2d}: {label}")
