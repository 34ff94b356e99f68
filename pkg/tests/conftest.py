import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from cqtele import _kernels_py  # noqa: E402

settings.register_profile("default", deadline=None, print_blob=True)
settings.load_profile("default")

_CRITERIA: dict[int, list] = {}


def _backends():
    out = [pytest.param(_kernels_py, id="python")]
    try:
        from cqtele import _kernels
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param(_kernels, id="cython"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    """Each batch-kernel implementation in turn."""
    return request.param


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, True])
    if report.failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
