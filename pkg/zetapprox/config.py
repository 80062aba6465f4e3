"""Application configuration classes."""
import os

from dotenv import load_dotenv

# Values from a local .env never override variables already set in the environment.
load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


class Config:
    """Base configuration."""

    WORKERS: int = _env_int("ZETAPPROX_WORKERS", 1)
    LOG_LEVEL: str = os.environ.get("ZETAPPROX_LOG_LEVEL", "INFO")
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
    OUTPUT_DIR: str = os.environ.get("ZETAPPROX_OUTPUT_DIR", "results")


class DevelopmentConfig(Config):
    """Development configuration."""

    LOG_LEVEL: str = os.environ.get("ZETAPPROX_LOG_LEVEL", "DEBUG")


class ProductionConfig(Config):
    """Production configuration."""

    LOG_LEVEL: str = os.environ.get("ZETAPPROX_LOG_LEVEL", "WARNING")


class TestingConfig(Config):
    """Testing configuration: single worker, quiet logs."""

    WORKERS: int = 1
    LOG_LEVEL: str = "WARNING"
    OUTPUT_DIR: str = os.environ.get("ZETAPPROX_OUTPUT_DIR", "results-test")


config_map = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
    "default": DevelopmentConfig,
}
