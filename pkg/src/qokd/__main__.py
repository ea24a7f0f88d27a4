"""
Entry point for running QOKD as a module: python -m qokd
"""

from qokd.cli.main import cli

if __name__ == "__main__":
    cli()
