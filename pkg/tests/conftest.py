import numpy as np
import pytest

from dictator_eval.persona import PersonaProfile
from dictator_eval.protocol import TrialConfig

_acceptance: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        prev = _acceptance.get(number, (None, None))[0]
        status = "FAIL" if failed or prev == "FAIL" else "PASS"
        _acceptance[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, title = _acceptance[number]
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {title}")


@pytest.fixture
def profile():
    return PersonaProfile(age=34, gender="Female", education=2, married=True,
                          race="White", income_band=5, hispanic=False,
                          occupation="Service occupations", industry="Retail trade", mbti="INFP")


def make_config(framing="Give", amount=10, perspective="SoS", distance="Stranger",
                temperature=0.5, seed=1, tid="T0000000"):
    return TrialConfig(perspective, framing, distance, amount, temperature, seed, tid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
