import pytest

from coneforms.suites import SuiteConfig

CACHE_DIR = ".coneforms-cache"


@pytest.fixture(scope="session")
def cfg4() -> SuiteConfig:
    return SuiteConfig(n=4, seed=7, trials=8, cache_dir=CACHE_DIR)


@pytest.fixture(scope="session")
def cfg6() -> SuiteConfig:
    return SuiteConfig(n=6, seed=7, trials=8, cache_dir=CACHE_DIR)
