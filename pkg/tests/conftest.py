import sys
from pathlib import Path

# lets test modules import the shared reference implementations
sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in the order the criteria ran."""
    rows = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props or rep.when != "call":
                continue
            rows.append((props["order"], outcome, props["criterion"], props.get("detail", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for _, outcome, name, detail in sorted(rows):
        terminalreporter.write_line(f"[{label[outcome]}] {name}: {detail}")
