"""Prints one PASS/FAIL line per acceptance criterion after the run."""

from collections import defaultdict

CRITERIA = {
    1: "static ranks match dense oracle",
    2: "rank sum stays 1 every iteration",
    3: "closed-loop fixed-point identity",
    4: "engine equivalences",
    5: "affected-set oracles",
    6: "dynamic accuracy",
    7: "work-reduction trend",
    8: "partition correctness",
    9: "pipeline smoke test",
    10: "determinism",
}

_criterion_of: dict[str, int] = {}
_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _criterion_of[item.nodeid] = int(marker.args[0])


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[n].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            continue
        failed = [nodeid.split("::", 1)[1] for nodeid, outcome in results if outcome == "failed"]
        skipped = all(outcome == "skipped" for _, outcome in results)
        status = "FAIL" if failed else "SKIP" if skipped else "PASS"
        line = f"criterion {n:2d} {status}  {CRITERIA[n]}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        tr.write_line(line)
