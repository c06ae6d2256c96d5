"""Shared test configuration.

The terminal summary prints one PASS/FAIL line per acceptance criterion so
a full run ends with an explicit checklist.
"""

import re

_ACCEPTANCE_FILE = "test_acceptance.py"


def _criterion_name(nodeid: str) -> str:
    name = nodeid.split("::")[-1]
    name = re.sub(r"^test_", "", name)
    name = re.sub(r"\[.*\]$", "", name)
    return name.replace("_", " ")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if _ACCEPTANCE_FILE in nodeid and getattr(report, "when", "call") == "call":
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((nodeid, f"acceptance {status}: {_criterion_name(nodeid)}"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
