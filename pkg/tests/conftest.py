import json
from collections import defaultdict
from pathlib import Path

import pytest

ORACLE_PATH = Path(__file__).parent / "oracles" / "values.json"

_criteria = defaultdict(list)


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_PATH.read_text())


@pytest.fixture
def criterion():
    """record(number, ok, detail): one entry per checked part of an acceptance criterion."""

    def record(number, ok, detail):
        _criteria[number].append((bool(ok), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        parts = _criteria[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  " + "; ".join(d for _, d in parts))
