from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden" / "scalar_golden.txt"


def load_golden(path=GOLDEN):
    table = {}
    for line in path.read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, beta, h, k, value = line.split()
        table[(name, float(beta), float(h), int(k))] = float(value)
    return table


@pytest.fixture(scope="session")
def golden():
    return load_golden()


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def record():
    def _record(criterion, ok, detail=""):
        ACCEPTANCE_LINES[criterion] = (bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_LINES):
        ok, detail = ACCEPTANCE_LINES[crit]
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
