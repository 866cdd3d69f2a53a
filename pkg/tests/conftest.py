import os

import pytest

from qcluster.similarity import SimilarityInstance, make_stream, random_instance

SLOW = os.environ.get("QCLUSTER_SLOW") == "1"
TEST_SEED = 0x5EED


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip_slow = pytest.mark.skip(reason="Slow; set QCLUSTER_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def sweep(default: int, full: int) -> int:
    """Sample count for an acceptance sweep: reduced unless slow tests are on."""

    return full if SLOW else default


@pytest.fixture
def t3() -> SimilarityInstance:
    return SimilarityInstance.from_pairs(3, {(1, 2): 3.0, (1, 3): 2.0, (2, 3): 1.0})


@pytest.fixture
def p4() -> SimilarityInstance:
    weights = {(i, j): 1.0 for i in range(1, 5) for j in range(i + 1, 5)}
    weights.update({(1, 2): 10.0, (2, 3): 9.0, (3, 4): 8.0})
    return SimilarityInstance.from_pairs(4, weights)


@pytest.fixture
def stream():
    def _make(*keys):
        return make_stream(TEST_SEED, *keys)

    return _make


@pytest.fixture
def random_instances(stream):
    """``count`` seeded random instances with n drawn from ``n_range``."""

    def _make(count, n_range=(3, 8), label="instances"):
        rng = stream(label)
        lo, hi = n_range
        return [random_instance(int(rng.integers(lo, hi + 1)), rng) for _ in range(count)]

    return _make
