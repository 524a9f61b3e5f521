import pytest

from treekernel import Rwta, parse_tree, st_automaton

TRIO = {
    "t1": "f(h(a),f(h(a),b))",
    "t2": "f(h(a),h(b))",
    "t3": "f(f(b,h(b)),f(h(a),h(b)))",
}


@pytest.fixture(autouse=True, scope="session")
def _check_every_automaton():
    # every StAutomaton built or extended anywhere in the suite is validated
    st_automaton.CHECK_INVARIANTS = True
    yield
    st_automaton.CHECK_INVARIANTS = False


@pytest.fixture
def trio():
    return {k: parse_tree(v) for k, v in TRIO.items()}


@pytest.fixture
def cyclic():
    """The cyclic, non-deterministic automaton with states 1..5."""
    return Rwta.from_labels(
        {1: 0, 2: 3, 3: 1, 4: 2, 5: 4},
        [(1, "a"), (3, "a"), (2, "f", 1, 3), (4, "f", 3, 3), (5, "h", 2), (5, "h", 4), (5, "h", 5)],
    )


_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = item.user_properties[-1][1] if item.user_properties else ""
        _acceptance.append((marker.args[0], report.outcome, report.duration, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration, detail in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        extra = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"{status}  {name}  [{duration:.2f}s]{extra}")
