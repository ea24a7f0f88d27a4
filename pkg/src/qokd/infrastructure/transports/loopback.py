"""
In-process transport.

Frames are copied into one FIFO per directed route, so the endpoints see
exactly the bytes a socket would carry.
"""

from collections import defaultdict, deque

from qokd.core.exceptions import ProtocolError
from qokd.domain.entities import Role

__all__ = ["LoopbackTransport"]


class LoopbackTransport:
    """
    Transport that never leaves the process.

    Example:
        with LoopbackTransport() as transport:
            transport.send(Role.ALICE, Role.BOB, frame)
            assert transport.receive(Role.ALICE, Role.BOB) == frame
    """

    name = "inproc"

    def __init__(self) -> None:
        self._routes: dict[tuple[Role, Role], deque[bytes]] = defaultdict(deque)
        self.frames_sent = 0
        self.bytes_sent = 0

    def open(self) -> None:
        self._routes.clear()

    def close(self) -> None:
        self._routes.clear()

    def __enter__(self) -> "LoopbackTransport":
        self.open()
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def send(self, source: Role, destination: Role, frame: bytes) -> None:
        self._routes[(source, destination)].append(bytes(frame))
        self.frames_sent += 1
        self.bytes_sent += len(frame)

    def receive(self, source: Role, destination: Role, timeout: float | None = None) -> bytes:
        """
        Raises:
            ProtocolError: If nothing is waiting on the route
        """
        queue = self._routes[(source, destination)]
        if not queue:
            raise ProtocolError(
                f"No frame pending from {source.name} to {destination.name}",
                reason="transport-empty",
            )
        return queue.popleft()
