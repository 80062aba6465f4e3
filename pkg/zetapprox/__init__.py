"""Application factory."""
import logging.config
import os
from dataclasses import dataclass
from typing import Any

from .config import Config, config_map
from .extensions import pool

__version__ = "0.1.0"


@dataclass
class App:
    """Handle returned by the factory: the resolved configuration."""

    config: Config
    env: str


def _configure_logging(config: Config) -> None:
    logging.config.dictConfig({
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"default": {"format": config.LOG_FORMAT}},
        "handlers": {
            "stderr": {
                "class": "logging.StreamHandler",
                "formatter": "default",
                "stream": "ext://sys.stderr",
            },
        },
        "loggers": {"zetapprox": {"handlers": ["stderr"], "level": config.LOG_LEVEL}},
    })


def create_app(env: str | None = None, **overrides: Any) -> App:
    """Create and configure the application.

    Args:
        env: Configuration environment name. Defaults to the ZETAPPROX_ENV env var.
        **overrides: Attribute overrides applied on top of the configuration class
            (CLI flags land here, so they win over the environment).

    Returns:
        Configured application handle.
    """
    env = env or os.environ.get("ZETAPPROX_ENV", "default")
    config_cls = config_map.get(env, config_map["default"])
    config = config_cls()
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)

    app = App(config=config, env=env)
    _configure_logging(config)

    # Initialise extensions
    pool.init_app(app)

    return app
