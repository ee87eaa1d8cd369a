import numpy as np
import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_collection_finish(session):
    for item in session.items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            number, title = mark.args
            _CRITERIA.setdefault(number, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[mark.args[0]]["outcomes"].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        c = _CRITERIA[number]
        if not c["outcomes"]:
            status = "NOT RUN"
        elif all(o == "passed" for o in c["outcomes"]):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {c['title']}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
