import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.rep_call = report


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(test_acceptance.RESULTS):
        status, summary = test_acceptance.RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {summary}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
