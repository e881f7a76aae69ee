from pathlib import Path

import numpy as np
import pytest

from opinet import bundled_scenario, simulate, validate_network

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def toy12():
    return bundled_scenario("toy12")


@pytest.fixture(scope="session")
def toy12_traj(toy12):
    return simulate(validate_network(toy12.spec), toy12.x0, toy12.simulation.horizon)


@pytest.fixture(scope="session")
def krackhardt():
    return bundled_scenario("krackhardt")


@pytest.fixture(scope="session")
def reference_pq():
    load = lambda name: np.loadtxt(DATA / name, delimiter=",")  # noqa: E731
    return load("toy12_reference_P.csv"), load("toy12_reference_Q.csv")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, whatever the outcome
_CRITERIA: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call") or (rep.when == "setup" and rep.passed):
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail")
    line = f"criterion {number} {'PASS' if rep.passed else 'FAIL'}: {title}"
    _CRITERIA[number] = line + (f" [{detail}]" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
