import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# (label, passed, detail) appended by the acceptance tests
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
