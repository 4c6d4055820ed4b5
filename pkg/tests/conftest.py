import pytest

from hfpss.runner import run_scenario
from hfpss.scenarios import builtin


@pytest.fixture(scope="session")
def ko_run():
    return run_scenario(builtin("ko-endo"))


@pytest.fixture(scope="session")
def pic_run():
    return run_scenario(builtin("pic-kgl-2adic"))


@pytest.fixture(scope="session")
def pic_ko_run():
    return run_scenario(builtin("pic-ko-classical"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
