def pytest_terminal_summary(terminalreporter):
    """Show the acceptance scorecard after capture ends, one line per criterion."""
    from tests.test_acceptance import SCORECARD

    if SCORECARD:
        terminalreporter.section("acceptance criteria")
        for line in SCORECARD:
            terminalreporter.write_line(line)
