import time

import pytest

_results = {}


@pytest.fixture
def detail(request):
    """Append free-text findings that go into the acceptance summary line."""
    notes = []
    request.node.user_properties.append(("detail", notes))
    return notes


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("seconds", time.perf_counter() - start))


def pytest_runtest_logreport(report):
    marks = [m for m in getattr(report, "_acceptance", [])]
    if report.when == "call" and marks:
        number, title = marks[0]
        props = dict(report.user_properties)
        _results[number] = (title, report.outcome, props.get("detail", []), props.get("seconds", 0.0))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("acceptance")
    if m is not None:
        outcome.get_result()._acceptance = [m.args]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        title, outcome, notes, secs = _results[n]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {n:2d} {status}  {title} ({secs:.1f} s)"
        if notes:
            line += ": " + "; ".join(notes)
        terminalreporter.write_line(line)
    failed = [n for n in sorted(_results) if _results[n][1] != "passed"]
    terminalreporter.write_line(f"{len(_results) - len(failed)}/{len(_results)} criteria pass"
                                + (f", failing: {failed}" if failed else ""))
