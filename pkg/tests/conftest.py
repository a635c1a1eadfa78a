import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion.

    Lines are echoed immediately and repeated in the terminal summary so the
    verdicts survive pytest's output capturing.
    """

    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"acceptance {criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
        ACCEPTANCE_RESULTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
