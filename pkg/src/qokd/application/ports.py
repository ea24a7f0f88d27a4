"""
Port interfaces for the application layer.

These are the interfaces that infrastructure adapters must implement.
They define the contract between use cases and the outside world.
"""

from typing import Protocol, runtime_checkable

from qokd.domain.entities import Role

__all__ = [
    "Transport",
]


@runtime_checkable
class Transport(Protocol):
    """
    Port for session transports.

    Implementations move encoded frames between the three roles:
    - in process (loopback)
    - over localhost TCP, one connection per directed route

    receive() returns the next frame sent on the route (source, destination),
    in send order.
    """

    name: str

    def open(self) -> None:
        """Acquire whatever the transport needs (sockets, queues)."""
        ...

    def close(self) -> None:
        """Release everything open() acquired."""
        ...

    def send(self, source: Role, destination: Role, frame: bytes) -> None:
        """Put one encoded frame on the route."""
        ...

    def receive(self, source: Role, destination: Role, timeout: float | None = None) -> bytes:
        """Take the next frame off the route."""
        ...

    def __enter__(self) -> "Transport":
        ...

    def __exit__(self, *exc: object) -> None:
        ...
