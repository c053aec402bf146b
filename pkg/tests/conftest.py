import pytest

from wifipos import build_radio_map, precompute
from wifipos.synth import corner_env, generate_survey

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.outcome, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, outcome, name in sorted(_ACCEPTANCE, key=lambda r: (str(r[0]), r[3])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num}: {title} ({name})")


@pytest.fixture(scope="session")
def quiet_env():
    return corner_env(sigma_db=0.0, seed=3)


@pytest.fixture(scope="session")
def noisy_env():
    return corner_env(sigma_db=3.0, seed=11)


@pytest.fixture(scope="session")
def noisy_map(noisy_env):
    return build_radio_map(generate_survey(noisy_env, 30), noisy_env.grid)


@pytest.fixture(scope="session")
def noisy_table(noisy_map):
    return precompute(noisy_map)
