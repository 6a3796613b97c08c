import pytest


@pytest.fixture(autouse=True)
def no_solution_cache(monkeypatch):
    # the CLI reads RESYM_CACHE; tests never touch ~/.cache
    monkeypatch.setenv("RESYM_CACHE", "off")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: wide sweeps over scanned primes")
