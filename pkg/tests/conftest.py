import pytest

_RESULTS: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        ok = rep.outcome == "passed" and not hasattr(rep, "wasxfail")
        n, title = mark.args
        _RESULTS.setdefault(n, []).append((ok, title, item.name, getattr(rep, "wasxfail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        parts = _RESULTS[n]
        ok = all(p[0] for p in parts)
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {parts[0][1]}"
        bad = [f"{name} ({why})" if why else name for good, _, name, why in parts if not good]
        if bad:
            line += "  [failing: " + "; ".join(bad) + "]"
        terminalreporter.write_line(line)
