import json
import re
from datetime import datetime, timedelta
from pathlib import Path
from loguru import logger

from surface_app.config import config


class CachingService:
    """Dated JSON files keyed by a name and a flat parameter dict."""

    def __init__(self, cache_path: Path, cache_enabled: bool = True, refresh_days: int = 30):
        self.cache_enabled = cache_enabled
        self.refresh_days: int = refresh_days
        if self.cache_enabled:
            self.cache_path = cache_path
            self.cache_path.mkdir(parents=True, exist_ok=True)
        else:
            self.cache_path = None

    @staticmethod
    def _sanitize(text: str) -> str:
        return re.sub(r'[<>:"/\\|?*&\s]', "", text)

    def _param_string(self, params: dict) -> str:
        return "_".join(f"{k}-{self._sanitize(str(v))}" for k, v in sorted(params.items()))

    def get_cache_file_path(self, name: str, params: dict) -> Path | None:
        if not self.cache_enabled:
            return None
        date = datetime.now().strftime("%Y-%m-%d-%H-%M-%S")
        return self.cache_path / f"{date}_{self._sanitize(name)}_{self._param_string(params)}.json"

    def is_cache_valid(self, file_path: Path | None) -> bool:
        if not self.cache_enabled or not file_path or not file_path.exists():
            return False
        file_time = datetime.fromtimestamp(file_path.stat().st_mtime)
        return datetime.now() - file_time < timedelta(days=self.refresh_days)

    def save_cache(self, data: dict, file_path: Path | None) -> None:
        if not self.cache_enabled or not file_path:
            return
        try:
            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=4)
        except (OSError, TypeError) as e:
            logger.warning(f"Failed to write cache file {file_path}: {e}")

    def load_cache(self, file_path: Path | None) -> dict:
        if not self.cache_enabled or not file_path or not file_path.exists():
            return {}
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, ValueError) as e:
            logger.warning(f"Failed to read cache file {file_path}: {e}")
            return {}

    def get_recent_cache_file(self, name: str, params: dict) -> Path | None:
        if not self.cache_enabled:
            return None
        pattern = f"*_{self._sanitize(name)}_{self._param_string(params)}.json"
        matching_files = sorted(self.cache_path.glob(pattern), reverse=True)
        return matching_files[0] if matching_files else None

    def load_recent(self, name: str, params: dict) -> dict:
        """Most recent still-valid entry, or an empty dict."""
        file_path = self.get_recent_cache_file(name, params)
        if not self.is_cache_valid(file_path):
            return {}
        logger.info(f"Using cached {name} from {file_path.name}")
        return self.load_cache(file_path)

    def clean_cache(self, name: str, params: dict) -> None:
        if not self.cache_enabled:
            return
        pattern = f"*_{self._sanitize(name)}_{self._param_string(params)}.json"
        for file in self.cache_path.glob(pattern):
            if not self.is_cache_valid(file):
                logger.info(f"Removing stale cache file {file}")
                try:
                    file.unlink()
                except OSError as e:
                    logger.warning(f"Failed to remove cache file {file}: {e}")

    def save_with_cleanup(self, data: dict, name: str, params: dict) -> None:
        if not self.cache_enabled:
            return
        self.clean_cache(name, params)
        self.save_cache(data, self.get_cache_file_path(name, params))


cache_enabled = config.get_bool("CACHE_ENABLED")
caching_service = CachingService(Path().absolute() / "__surface_cache__", cache_enabled)
