import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion, printed in the terminal summary."""
    state = {"label": None}

    def _label(text):
        state["label"] = text

    yield _label
    rep = getattr(request.node, "rep_call", None)
    if state["label"] is not None and rep is not None:
        _ACCEPTANCE_LINES.append(f"{'PASS' if rep.passed else 'FAIL'}  {state['label']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
