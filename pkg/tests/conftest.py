import sys


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, collected while the suite ran
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
