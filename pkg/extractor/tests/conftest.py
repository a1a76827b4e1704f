from pathlib import Path

import pytest

ACCEPTANCE_FILE = "test_roundtrip.py"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per round-trip criterion."""
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if ACCEPTANCE_FILE not in str(getattr(report, "nodeid", "")):
                continue
            name = report.nodeid.split("::", 1)[-1]
            verdict = "PASS" if status == "passed" else "FAIL"
            lines.append((name, verdict))
    if not lines:
        return
    terminalreporter.write_sep("=", "extractor acceptance")
    for name, verdict in sorted(lines):
        terminalreporter.write_line(f"{verdict}  {name}")
