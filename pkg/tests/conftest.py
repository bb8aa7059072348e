import pytest

from ffsalem.finite_field import make_field

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""
    def _record(label: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=[(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3)], ids=lambda pn: f"{pn[0]}^{pn[1]}")
def small_field(request):
    return make_field(*request.param)
