import pytest

_RESULTS = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.get_closest_marker("acceptance") is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        doc = (item.obj.__doc__ or item.name).strip()
        _RESULTS.append((report.passed, doc, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ok, doc, duration in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {doc} [{duration:.2f}s]")
