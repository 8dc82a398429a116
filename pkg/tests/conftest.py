from __future__ import annotations

ACCEPTANCE_OUTCOMES: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion reported in the run summary"
    )


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    outcome = "PASS" if call.excinfo is None else "FAIL"
    # never upgrade a FAIL (e.g. on reruns)
    if ACCEPTANCE_OUTCOMES.get(name) != "FAIL":
        ACCEPTANCE_OUTCOMES[name] = outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE_OUTCOMES.items():
        terminalreporter.write_line(f"{outcome}  {name}")
