import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one summary line per acceptance criterion."""

    def record(number: int, passed: bool, text: str) -> None:
        _VERDICTS.append(f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}")
        print(_VERDICTS[-1])

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
