import pytest

_VERDICTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """Record one acceptance criterion's outcome for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str = "") -> None:
        _VERDICTS[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        passed, detail = _VERDICTS[number]
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
