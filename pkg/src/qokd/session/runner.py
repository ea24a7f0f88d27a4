"""
Drive the three endpoints of a session through a transport.

The runner keeps one FIFO of outgoing messages. Each message is encoded,
sent, received on its route and handed to the destination endpoint; the
replies join the back of the queue. Delivery order depends only on the
queue, so every transport yields the same transcript.
"""

import logging
from collections import deque
from typing import TYPE_CHECKING, NamedTuple

from qokd.core.exceptions import ProtocolError, ValidationError
from qokd.core.limits import MAX_SESSION_STEPS, validate_positive, validate_raw_qubits
from qokd.domain.entities import Aborted, Role, SessionConfig
from qokd.domain.services import ExtractionScheme
from qokd.exchange.strategies import make_alice, make_bob
from qokd.extraction.schemes import make_scheme
from qokd.session.roles import Alice, Bob, Endpoint, Outgoing, Referee
from qokd.session.transcript import SessionOutcome, SessionTranscript
from qokd.session.wire import MessageType, encode_frame

if TYPE_CHECKING:
    from qokd.application.ports import Transport

__all__ = ["Endpoints", "session_scheme", "build_endpoints", "run_session", "replay_session"]

logger = logging.getLogger(__name__)


def session_scheme(config: SessionConfig) -> ExtractionScheme:
    """
    Validate a session configuration and build its extraction scheme.

    Raises:
        ValidationError: On a non-honest Bob, bad r, cap or database index
        LimitExceededError: If the raw keys would exceed the qubit budget
    """
    if config.bob != "honest":
        raise ValidationError(
            "Sessions run with an honest Bob; use the attack experiment for biased states",
            parameter="bob",
            value=config.bob,
        )
    validate_positive(config.r, "r")
    if config.restart_cap < 0:
        raise ValidationError("Restart cap must be non-negative", parameter="restart_cap", value=config.restart_cap)
    scheme = make_scheme(config.scheme, config.n, config.k, config.m)
    validate_raw_qubits(scheme.raw_length * config.r)
    if config.db_index is not None and not 0 <= config.db_index < config.n:
        raise ValidationError(
            f"Database index {config.db_index} outside 0..{config.n - 1}",
            parameter="db_index",
            value=config.db_index,
        )
    return scheme


class Endpoints(NamedTuple):
    alice: Alice
    bob: Bob
    referee: Referee

    def by_role(self) -> dict[Role, Endpoint]:
        return {Role.ALICE: self.alice, Role.BOB: self.bob, Role.REFEREE: self.referee}


def build_endpoints(config: SessionConfig, scheme: ExtractionScheme | None = None) -> Endpoints:
    scheme = scheme or session_scheme(config)
    return Endpoints(
        alice=Alice(config, scheme, make_alice(config.alice)),
        bob=Bob(config, scheme, make_bob(config.bob)),
        referee=Referee(config, scheme),
    )


def run_session(
    config: SessionConfig,
    transport: "Transport | None" = None,
    max_steps: int = MAX_SESSION_STEPS,
) -> SessionOutcome:
    """
    Run one oblivious-transfer session end to end.

    The transcript lists messages in the order they were put on the wire.
    Its status is Completed when Alice decrypted her bit, otherwise Aborted
    with the reason of the first ABORT (or step-limit / stalled).

    Args:
        config: Session parameters
        transport: Where frames travel; an in-process loopback by default
        max_steps: Upper bound on delivered messages

    Raises:
        ValidationError: If the configuration cannot run
    """
    scheme = session_scheme(config)
    parties = build_endpoints(config, scheme)
    alice, bob = parties.alice, parties.bob
    endpoints = parties.by_role()

    if transport is None:
        from qokd.infrastructure.transports.loopback import LoopbackTransport

        transport = LoopbackTransport()

    transcript = SessionTranscript()
    pending: deque[tuple[Role, Outgoing]] = deque((Role.ALICE, out) for out in alice.start())
    steps = 0
    failure: str | None = None
    with transport:
        while pending:
            if steps >= max_steps:
                failure = "step-limit"
                break
            steps += 1
            source, (destination, msg) = pending.popleft()
            try:
                transport.send(source, destination, encode_frame(msg))
                frame = transport.receive(source, destination)
            except ProtocolError as e:
                logger.warning("transport failed: %s", e.message)
                failure = e.reason
                break
            transcript.append(source, destination, msg)
            replies = endpoints[destination].receive(source, frame)
            pending.extend((destination, out) for out in replies)

    first_abort = next((e.message for e in transcript if e.message.type == MessageType.ABORT), None)
    if failure is not None:
        transcript.status = Aborted(failure, alice.restarts)
    elif first_abort is not None:
        transcript.status = Aborted(str(first_abort.payload.get("reason", "unknown")), alice.restarts)
    elif alice.closed and alice.status is not None:
        transcript.status = alice.status
    else:
        transcript.status = Aborted("stalled", alice.restarts)

    expected = bob.database[alice.db_index] if alice.db_index is not None else None
    logger.info(
        "session seed=%d transport=%s messages=%d status=%s",
        config.seed,
        transport.name,
        len(transcript),
        type(transcript.status).__name__.lower(),
    )
    return SessionOutcome(transcript, expected, alice.db_index)


def replay_session(config: SessionConfig, transcript: SessionTranscript, transport: "Transport | None" = None) -> bool:
    """Re-run a session and check that it reproduces the transcript exactly."""
    return run_session(config, transport).transcript.digest() == transcript.digest()
