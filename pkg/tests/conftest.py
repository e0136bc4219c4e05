import pytest

from crowdcap import HAVE_COMPILED

BACKENDS = ["python"] + (["compiled"] if HAVE_COMPILED else [])

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        n, title = mark.args
        _criteria.append((n, title, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome, dur in sorted(_criteria):
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{flag}  criterion {n:>2}: {title} ({dur:.2f}s)")
