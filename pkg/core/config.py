"""Configuration management for CBCChaos."""

import os
import json
from typing import Optional

from core.log import get_logger

logger = get_logger('config')

# Environment variable that raises the block-size ceiling (needs acknowledgment)
MAX_N_ENV = 'CBCCHAOS_MAX_N'


class ConfigManager:
    """Handles loading and saving analysis limits and defaults."""

    DEFAULT_CONFIG = {
        'max_n': 20,                  # implicit graph work is exponential in n
        'explicit_max_n': 12,         # explicit SCC materialises every edge
        'render_max_n': 6,            # edge tables and DOT output
        'bijection_sample_size': 4096,
        'default_seed': 0
    }

    def __init__(self, config_path: str = None):
        """
        Initialize the ConfigManager.

        Args:
            config_path: Path to the config file. If None, uses default location.
        """
        if config_path is None:
            # Default to cbcchaos_config.json in the project root
            config_path = os.path.join(
                os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                'cbcchaos_config.json'
            )
        self.config_path = config_path
        self._config = None

    @property
    def config(self) -> dict:
        """Get the current configuration, loading if necessary."""
        if self._config is None:
            self.load()
        return self._config

    def load(self) -> dict:
        """Load configuration from file, keeping defaults for missing keys."""
        self._config = self.DEFAULT_CONFIG.copy()
        if os.path.exists(self.config_path):
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                if isinstance(loaded, dict):
                    self._config.update(loaded)
            except (json.JSONDecodeError, IOError) as e:
                logger.warning("ignoring unreadable config %s: %s", self.config_path, e)
        return self._config

    def save(self) -> bool:
        """
        Save current configuration to file.

        Returns:
            True if save was successful, False otherwise.
        """
        try:
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=2)
            return True
        except IOError:
            return False

    def _int(self, key: str) -> int:
        try:
            return int(self.config.get(key, self.DEFAULT_CONFIG[key]))
        except (TypeError, ValueError):
            return self.DEFAULT_CONFIG[key]

    @property
    def max_n(self) -> int:
        """Configured block-size ceiling (without environment override)."""
        return self._int('max_n')

    @property
    def explicit_max_n(self) -> int:
        """Largest n for which every edge may be materialised."""
        return self._int('explicit_max_n')

    @property
    def render_max_n(self) -> int:
        """Largest n for edge tables and DOT renderings."""
        return self._int('render_max_n')

    @property
    def bijection_sample_size(self) -> int:
        """Number of sampled blocks when bijectivity cannot be checked exhaustively."""
        return max(self._int('bijection_sample_size'), 4096)

    @property
    def default_seed(self) -> int:
        """Seed used by randomized commands when none is given."""
        return self._int('default_seed')

    def set_max_n(self, max_n: int):
        """Save a new block-size ceiling."""
        self.config['max_n'] = int(max_n)
        self.save()

    def effective_max_n(self, allow_override: bool = False) -> int:
        """
        Block-size ceiling after the environment override.

        Args:
            allow_override: The caller acknowledged CBCCHAOS_MAX_N.

        Returns:
            The ceiling to enforce.
        """
        raw = os.environ.get(MAX_N_ENV)
        if not raw:
            return self.max_n
        if not allow_override:
            logger.warning("%s=%s ignored without --allow-large-n", MAX_N_ENV, raw)
            return self.max_n
        try:
            value = int(raw)
        except ValueError:
            logger.warning("%s=%r is not an integer, keeping %d", MAX_N_ENV, raw, self.max_n)
            return self.max_n
        logger.info("block-size ceiling raised to %d by %s", value, MAX_N_ENV)
        return max(value, 1)


# Global config instance (singleton pattern)
_config_instance: Optional[ConfigManager] = None


def get_config() -> ConfigManager:
    """Get the global configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = ConfigManager()
    return _config_instance


def set_config(manager: Optional[ConfigManager]):
    """Replace the global configuration instance (None resets to default)."""
    global _config_instance
    _config_instance = manager
