import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_configure(config):
    config._acceptance_results = []


@pytest.fixture
def acceptance(request):
    """Record one acceptance line: ``acceptance(number, title, passed, detail)``."""
    results = request.config._acceptance_results

    def record(number, title, passed, detail=""):
        results.append((number, title, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(results, key=lambda r: r[0]):
        terminalreporter.write_line(f"C{number} {'PASS' if passed else 'FAIL'}  {title}  [{detail}]")
