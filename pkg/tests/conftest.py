import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from kgraph_kms import fixtures  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def bundled():
    return {name: fixtures.build(name) for name in fixtures.BUNDLED}


@pytest.fixture(scope="session")
def gamma():
    return fixtures.gamma()


@pytest.fixture(scope="session")
def random_graphs():
    rng = random.Random(20240601)
    return [fixtures.random_2graph(rng) for _ in range(60)]


@pytest.fixture(scope="session")
def irreducible_graphs():
    rng = random.Random(777)
    return [fixtures.random_2graph(rng, irreducible=True) for _ in range(25)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
