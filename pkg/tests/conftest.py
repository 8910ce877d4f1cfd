import pytest

_ACCEPTANCE: dict[str, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label, title): end-to-end acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label, title = marker.args
    if report.when == "call" or report.failed:
        previous = _ACCEPTANCE.get(label, (title, True))[1]
        _ACCEPTANCE[label] = (title, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s[2:])):
        title, ok = _ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label} {title}")
