from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from dp3delta.config import builtin_configs

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def builtins():
    return {c.name: c for c in builtin_configs()}
