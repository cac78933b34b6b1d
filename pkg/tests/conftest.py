import pytest
from hypothesis import HealthCheck, settings

from conekit.cones import tangent_cone
from conekit.modelfile import load_fixture

settings.register_profile(
    "deterministic",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")

CRITERIA: dict = {}


@pytest.fixture(scope="session")
def fayet():
    return load_fixture("fayet_wohlhart")


@pytest.fixture(scope="session")
def fourbar():
    return load_fixture("fourbar_planar")


@pytest.fixture(scope="session")
def triangle():
    return load_fixture("triangle_3r")


@pytest.fixture(scope="session")
def fayet_cone(fayet):
    return tangent_cone(fayet, 6)


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, passed, detail):
        CRITERIA[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
