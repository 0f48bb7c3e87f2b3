import pytest

# criterion number -> (title, "PASS" | "FAIL", detail)
ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture(scope="session")
def acceptance_results():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, verdict, detail = ACCEPTANCE[n]
        line = f"criterion {n:2d} {verdict}  {title}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line)
