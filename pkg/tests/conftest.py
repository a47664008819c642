import os
import sys

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ledger import ResourceBounds, build_ledger, default_constants, demo_constants  # noqa: E402
from sequence import build_store  # noqa: E402
from storage import result_storage  # noqa: E402

np.seterr(all="warn")

hypothesis.settings.register_profile("dev", max_examples=25, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture(scope="session")
def demo_ledger():
    return build_ledger(demo_constants(), 5)


@pytest.fixture(scope="session")
def demo_store(demo_ledger):
    return build_store(demo_ledger, workers=2)


@pytest.fixture(scope="session")
def small_ledger():
    return build_ledger(demo_constants(), 3)


@pytest.fixture(scope="session")
def small_store(small_ledger):
    return build_store(small_ledger, workers=1)


@pytest.fixture(scope="session")
def faithful_open_ledger():
    """Blocks 1 and 2 with the literal constants, block 2 left open."""
    return build_ledger(default_constants(), 2, ResourceBounds(max_beta=10 ** 9), close=False)


@pytest.fixture(autouse=True)
def clean_storage():
    result_storage.clear()
    yield
    result_storage.clear()
