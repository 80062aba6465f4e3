"""Command-line entry point."""
from zetapprox.cli import cli

if __name__ == "__main__":
    cli()
