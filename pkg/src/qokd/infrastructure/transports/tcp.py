"""
TCP transport on localhost.

The Referee's endpoint owns one listening socket. Each directed route
(source, destination) gets its own connection to it, opened with a 2-byte
preface naming the route. A reader thread per accepted connection splits
the byte stream into frames and queues them, so receive() only waits on
the route it is asked about.
"""

import logging
import queue
import socket
import threading

from qokd.core.exceptions import ProtocolError
from qokd.domain.entities import Role
from qokd.session.wire import HEADER_SIZE, frame_length

__all__ = ["TcpTransport", "ROUTES"]

logger = logging.getLogger(__name__)

ROUTES: tuple[tuple[Role, Role], ...] = tuple((a, b) for a in Role for b in Role if a != b)

_PREFACE_SIZE = 2


def _read_exact(sock: socket.socket, size: int) -> bytes:
    chunks = []
    remaining = size
    while remaining:
        chunk = sock.recv(min(remaining, 1 << 16))
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


class TcpTransport:
    """
    One TCP connection per directed route between the three roles.

    Args:
        host: Interface to bind and connect to
        port: Listening port; 0 picks a free one (see .port after open())
        timeout: Seconds receive() waits for a frame
    """

    name = "tcp"

    def __init__(self, host: str = "127.0.0.1", port: int = 0, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._listener: socket.socket | None = None
        self._senders: dict[tuple[Role, Role], socket.socket] = {}
        self._inboxes: dict[tuple[Role, Role], queue.Queue[bytes]] = {}
        self._readers: list[threading.Thread] = []
        self._accepted: list[socket.socket] = []

    def open(self) -> None:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self.port))
        listener.listen(len(ROUTES))
        self._listener = listener
        self.port = listener.getsockname()[1]

        for route in ROUTES:
            client = socket.create_connection((self.host, self.port), timeout=self.timeout)
            client.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            client.sendall(bytes([int(route[0]), int(route[1])]))
            conn, _ = listener.accept()
            conn.settimeout(None)
            preface = _read_exact(conn, _PREFACE_SIZE)
            accepted = (Role(preface[0]), Role(preface[1]))
            inbox: queue.Queue[bytes] = queue.Queue()
            self._senders[route] = client
            self._inboxes[accepted] = inbox
            self._accepted.append(conn)
            reader = threading.Thread(
                target=self._read_frames,
                args=(conn, inbox),
                name=f"qokd-tcp-{accepted[0].name.lower()}-{accepted[1].name.lower()}",
                daemon=True,
            )
            reader.start()
            self._readers.append(reader)
        logger.debug("tcp transport listening on %s:%d", self.host, self.port)

    def _read_frames(self, conn: socket.socket, inbox: "queue.Queue[bytes]") -> None:
        try:
            while True:
                header = _read_exact(conn, HEADER_SIZE)
                try:
                    length = frame_length(header)
                except ProtocolError:
                    # hand the bare header on; decoding it reports frame-too-large
                    inbox.put(header)
                    return
                inbox.put(header + _read_exact(conn, length))
        except (ConnectionError, OSError):
            return

    def send(self, source: Role, destination: Role, frame: bytes) -> None:
        self._senders[(source, destination)].sendall(frame)

    def receive(self, source: Role, destination: Role, timeout: float | None = None) -> bytes:
        """
        Raises:
            ProtocolError: transport-timeout if no frame arrives in time
        """
        try:
            return self._inboxes[(source, destination)].get(timeout=timeout or self.timeout)
        except queue.Empty as e:
            raise ProtocolError(
                f"No frame from {source.name} to {destination.name} within {timeout or self.timeout}s",
                reason="transport-timeout",
            ) from e

    def close(self) -> None:
        for sock in [*self._senders.values(), *self._accepted]:
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            sock.close()
        if self._listener is not None:
            self._listener.close()
            self._listener = None
        for reader in self._readers:
            reader.join(timeout=1.0)
        self._senders.clear()
        self._inboxes.clear()
        self._accepted.clear()
        self._readers.clear()

    def __enter__(self) -> "TcpTransport":
        self.open()
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
