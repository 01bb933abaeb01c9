import pytest

from ncpoly.corpus import exhaustive
from ncpoly.ribbon import fixture

_OUTCOMES: dict[int, dict] = {}


@pytest.fixture(scope="session")
def corpus():
    return exhaustive(4)


@pytest.fixture(scope="session")
def bubble():
    return fixture("bubble")


@pytest.fixture(scope="session")
def sunshine():
    return fixture("sunshine")


@pytest.fixture(scope="session")
def hyper():
    return fixture("hyper")


@pytest.fixture(scope="session")
def three_line():
    return fixture("three-line")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = mark.args
    entry = _OUTCOMES.setdefault(number, {"title": title, "ok": True, "details": []})
    entry["ok"] &= rep.passed
    details = [v for k, v in item.user_properties if k == "detail"]
    if rep.failed and not details:
        details = [str(call.excinfo.value).splitlines()[0] if call.excinfo else "error"]
    entry["details"].extend(details)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        e = _OUTCOMES[number]
        verdict = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {e['title']}: {verdict} | {'; '.join(e['details'])}")
