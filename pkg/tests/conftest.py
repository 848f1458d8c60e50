import pytest

CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[CRITERIA] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict: criterion(number, passed, detail)."""
    book = request.config.stash[CRITERIA]

    def record(number: int, passed: bool, detail: str) -> bool:
        book[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    book = config.stash.get(CRITERIA, {})
    if not book:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(book):
        passed, detail = book[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
