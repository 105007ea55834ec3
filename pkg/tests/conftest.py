import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=_order):
        terminalreporter.write_line(line)


def _order(line):
    if line.startswith("CRITERION"):
        return (0, int(line.split()[1].rstrip(":")))
    return (1, 0)
