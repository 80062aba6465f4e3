"""Entry point for ``python -m zetapprox``."""
from .cli import cli

if __name__ == "__main__":
    cli()
