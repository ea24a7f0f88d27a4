"""
Infrastructure layer for QOKD.

Adapters that implement the ports defined in the application layer:
session transports, the config file loader and report writers.
"""

from qokd.infrastructure.transports import (
    LoopbackTransport,
    TcpTransport,
    TRANSPORTS,
    make_transport,
)
from qokd.infrastructure.config import load_config_mapping, load_experiment_config
from qokd.infrastructure.reports import REPORT_COLUMNS, render_report, write_report

__all__ = [
    # Transports
    "LoopbackTransport",
    "TcpTransport",
    "TRANSPORTS",
    "make_transport",
    # Configuration
    "load_config_mapping",
    "load_experiment_config",
    # Reports
    "REPORT_COLUMNS",
    "render_report",
    "write_report",
]
