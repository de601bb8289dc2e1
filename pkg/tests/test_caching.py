import os
import time

import surface_app  # noqa: F401
from storage.caching import CachingService


def test_save_and_load_recent(tmp_path):
    service = CachingService(tmp_path / "cache")
    service.save_with_cleanup({"cells": [1, 2]}, "sweep", {"config": "abc"})
    assert service.load_recent("sweep", {"config": "abc"}) == {"cells": [1, 2]}
    assert service.load_recent("sweep", {"config": "other"}) == {}


def test_file_name_is_sanitized(tmp_path):
    service = CachingService(tmp_path / "cache")
    path = service.get_cache_file_path("table", {"code": "reed muller/15?"})
    assert path.name.endswith("_table_code-reedmuller15.json")


def test_disabled_service(tmp_path):
    service = CachingService(tmp_path / "cache", cache_enabled=False)
    service.save_with_cleanup({"a": 1}, "sweep", {"config": "abc"})
    assert service.get_cache_file_path("sweep", {}) is None
    assert service.get_recent_cache_file("sweep", {}) is None
    assert service.load_recent("sweep", {"config": "abc"}) == {}
    assert not (tmp_path / "cache").exists()


def test_unreadable_file_loads_empty(tmp_path):
    service = CachingService(tmp_path / "cache")
    path = service.get_cache_file_path("sweep", {"config": "abc"})
    path.write_text("{not json")
    assert service.load_recent("sweep", {"config": "abc"}) == {}


def test_stale_file_is_removed(tmp_path):
    service = CachingService(tmp_path / "cache", refresh_days=1)
    params = {"config": "abc"}
    path = service.get_cache_file_path("sweep", params)
    service.save_cache({"old": True}, path)
    old = time.time() - 3 * 24 * 3600
    os.utime(path, (old, old))

    assert not service.is_cache_valid(path)
    assert service.load_recent("sweep", params) == {}
    service.clean_cache("sweep", params)
    assert not path.exists()
