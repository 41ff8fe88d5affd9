import os

from hypothesis import settings

import support

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    support.UNDER_PYTEST = True


def pytest_terminal_summary(terminalreporter):
    if support.CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in support.CRITERIA_LINES:
            terminalreporter.write_line(line)
