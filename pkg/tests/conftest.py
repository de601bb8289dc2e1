import numpy as np
import pytest
from fastapi.testclient import TestClient

# the application package has to be imported before storage.caching
import surface_app
from storage.caching import CachingService


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def client() -> TestClient:
    return TestClient(surface_app.app)


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch) -> CachingService:
    """Enabled cache in a temporary directory, patched into the modules that use it."""
    service = CachingService(tmp_path / "cache", cache_enabled=True)
    monkeypatch.setattr("storage.caching.caching_service", service)
    monkeypatch.setattr("surface_app.logic.surface.caching_service", service)
    monkeypatch.setattr("surface_app.logic.helpers.magic_lab.caching_service", service)
    return service
