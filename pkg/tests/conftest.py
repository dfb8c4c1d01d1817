import pytest

from gcenter import presets
from gcenter.rotor import solve_bands

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def singlet():
    return solve_bands(presets.SINGLET_EXCITED_STATE)


@pytest.fixture(scope="session")
def triplet():
    return solve_bands(presets.TRIPLET_STATE)


@pytest.fixture(scope="session")
def ground():
    return solve_bands(presets.GROUND_STATE)
