import sys

import pytest

from ma_ris_sim.scenario import ScenarioConfig


@pytest.fixture
def cfg():
    return ScenarioConfig()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
