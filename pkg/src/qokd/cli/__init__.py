"""
CLI interface for QOKD.
"""

from qokd.cli.main import cli

__all__ = ["cli"]
