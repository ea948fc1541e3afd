import pytest

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def record(request):
    """Store a criterion outcome for the end-of-run summary."""
    store = request.config.stash.setdefault(_CRITERIA, {})

    def put(number: int, ok: bool, detail: str) -> None:
        store[number] = (ok, detail)
    return put


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_CRITERIA, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        ok, detail = store[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
