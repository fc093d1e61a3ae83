import pytest

from fecapsim.config import load_config


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def gpu_fixture(cfg):
    return cfg.gpu_fixture()
