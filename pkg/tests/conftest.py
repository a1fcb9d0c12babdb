import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, settings as hypothesis_settings

from app.core import config

hypothesis_settings.register_profile(
    "ecasync",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
hypothesis_settings.load_profile("ecasync")


@pytest.fixture(autouse=True)
def live_settings():
    """Run tasks in-process and undo any budget overrides made by a test."""
    budgets = config.current_budgets()
    progress, jobs = config.settings.PROGRESS, config.settings.JOBS
    config.settings.PROGRESS, config.settings.JOBS = False, 1
    yield config.settings
    config.override(budgets)
    config.settings.PROGRESS, config.settings.JOBS = progress, jobs


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
