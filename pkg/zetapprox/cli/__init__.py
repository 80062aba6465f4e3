"""Command-line interface."""
import logging
import os
from pathlib import Path

import click

from .. import __version__, create_app
from ..errors import ConfigError, register_error_handlers
from ..extensions import pool
from .commands import build_model, psi_case, run
from .run_config import parse_config, serialize_config

logger = logging.getLogger(__name__)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from None


@click.group()
@click.version_option(version=__version__, prog_name="zetapprox")
def cli() -> None:
    """Numerical experiments on truncated Dirichlet-series approximations."""


@cli.command("run")
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes (overrides ZETAPPROX_WORKERS).")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), default=None, help="Artifact directory.")
@click.option("--env", default=None, help="Configuration environment (development, production, testing).")
@register_error_handlers
def run_command(config_path: Path, workers: int | None, output_dir: Path | None, env: str | None) -> None:
    """Run the experiment described by CONFIG_PATH."""
    config = parse_config(_read(config_path))
    if workers is None and "ZETAPPROX_WORKERS" not in os.environ:
        workers = config.output.workers
    app = create_app(env, WORKERS=workers)
    logger.info("Running %s from %s with %d worker(s)", config.command.name, config_path, app.config.WORKERS)
    directory = output_dir or Path(config.output.directory or app.config.OUTPUT_DIR)
    try:
        outcome = run(config, directory)
    finally:
        pool.shutdown()
    for path in outcome.artifacts:
        click.echo(str(path))
    click.echo(str(outcome.manifest))


@cli.command("show-config")
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
@register_error_handlers
def show_config_command(config_path: Path) -> None:
    """Print the fully defaulted configuration without running it."""
    config = parse_config(_read(config_path))
    click.echo(serialize_config(config), nl=False)
    case = psi_case(build_model(config.model), config.command.a)
    if case is not None:
        click.echo(f"# psi case: {case}")
