import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

# filled by test_acceptance: {number: (title, status, seconds, limit)}
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, status, secs, limit = ACCEPTANCE[n]
        lim = f" (limit {limit:g}s)" if limit else ""
        terminalreporter.write_line(f"criterion {n:2d} {status}  {secs:6.2f}s{lim}  {title}")
