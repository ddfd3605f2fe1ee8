import json

import pytest
from hypothesis import settings

from domkit import CredenceFunction, OutcomeSpace

settings.register_profile("domkit", max_examples=60, deadline=None)
settings.load_profile("domkit")

ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        ACCEPTANCE[number] = (title, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def two():
    return OutcomeSpace.of_size(2)


@pytest.fixture
def three():
    return OutcomeSpace.of_size(3)


@pytest.fixture
def incoherent():
    """c(empty)=0, c(w1)=0.6, c(w2)=0.7, c(Omega)=1."""
    return CredenceFunction([0.0, 0.6, 0.7, 1.0])


@pytest.fixture
def log_instance():
    return CredenceFunction([0.0, 0.0, 0.5, 1.0])


@pytest.fixture
def write_json(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write

