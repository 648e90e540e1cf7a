import _acceptance_log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = _acceptance_log.RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in results:
        mark = "PASS" if ok else "FAIL"
        line = f"{mark}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
    n_ok = sum(1 for _, ok, _ in results if ok)
    terminalreporter.write_line(f"{n_ok}/{len(results)} criteria passing")
