import pytest

from lshlab import synthesize


@pytest.fixture(scope="session")
def small_dataset():
    """10 queries x 100 train, quick enough for oracle comparisons."""
    return synthesize(10, 100, 2000, seed=101)


@pytest.fixture(scope="session")
def oracle_dataset():
    """50 queries x 1000 train, the size used for brute-force agreement."""
    return synthesize(50, 1000, 5000, seed=202)


@pytest.fixture(scope="session")
def default_corpus():
    """The default 200 x 2000 planted-neighbor retrieval corpus."""
    return synthesize(200, 2000, 10000)
