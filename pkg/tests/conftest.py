"""Shared test configuration.

Property-based tests run with a fixed profile so CI timing stays
predictable; fixtures that are expensive to build (dense synthetic rooms)
are session-scoped and shared across modules.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
