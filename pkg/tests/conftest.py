import pytest

CRITERIA = {
    1: "2-near-perfect 2^k p^2 set is {18, 36, 200}",
    2: "strongly 2-near-perfect table below 10^6",
    3: "strong family primes for the listed a",
    4: "every 2^k p witness falls in one of four families",
    5: "discriminant and divisibility audits",
    6: "spot values",
    7: "property suites",
    8: "no quasiperfect n <= 10^6",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        results = _outcomes.get(number)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
