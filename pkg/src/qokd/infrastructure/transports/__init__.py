"""
Frame transports for sessions.
"""

from qokd.core.exceptions import ValidationError
from qokd.infrastructure.transports.loopback import LoopbackTransport
from qokd.infrastructure.transports.tcp import TcpTransport

__all__ = ["LoopbackTransport", "TcpTransport", "TRANSPORTS", "make_transport"]

TRANSPORTS = ("inproc", "tcp")


def make_transport(name: str, port: int = 0) -> LoopbackTransport | TcpTransport:
    if name == "inproc":
        return LoopbackTransport()
    if name == "tcp":
        return TcpTransport(port=port)
    raise ValidationError(f"Unknown transport: {name}", parameter="transport", value=name)
