"""
Session endpoints as message-driven state machines.

Each endpoint takes raw frames through receive() and returns the messages
it wants delivered next. Nothing here touches a socket: the runner moves
frames through a transport. A ProtocolError raised while handling a frame
is turned into ABORT messages to both peers; the endpoint then ignores
anything else it receives.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, NamedTuple

import numpy as np
from bitarray import frozenbitarray

from qokd.core.bits import bits_from_array, bits_from_base64, bits_to_array, bits_to_base64
from qokd.core.exceptions import ProtocolError, ValidationError
from qokd.core.models import VerdictCode
from qokd.core.rng import derive_rng
from qokd.domain.entities import (
    Aborted,
    Completed,
    Database,
    MeasurementRequest,
    ObliviousKeyView,
    Restarted,
    Role,
    SessionConfig,
    SessionStatus,
)
from qokd.domain.services import AliceStrategy, BobStrategy, ExtractionScheme
from qokd.exchange.exchange import referee_measure
from qokd.extraction.dilution import combine_known, dilute, greedy_dilution_shifts
from qokd.session.ot import announce_shift, decrypt_bit, encrypt_db
from qokd.session.wire import MessageType, WireMessage, decode_frame, decode_octants, encode_octants

__all__ = ["Outgoing", "Endpoint", "Alice", "Bob", "Referee", "DATABASE_STREAM"]

logger = logging.getLogger(__name__)

# rng path component for Bob's plaintext database
DATABASE_STREAM = 0xDB


class Outgoing(NamedTuple):
    destination: Role
    message: WireMessage


def _message(msg_type: MessageType, **payload: Any) -> WireMessage:
    return WireMessage(msg_type, payload)


def _field(payload: dict[str, Any], name: str, kind: type) -> Any:
    value = payload.get(name)
    # bool passes isinstance(value, int)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ProtocolError(f"Missing or mistyped field '{name}'", reason="malformed-frame")
    return value


def _out_of_order(role: Role, source: Role, msg: WireMessage) -> ProtocolError:
    return ProtocolError(
        f"{role.name} cannot accept {msg.type.name} from {source.name} now",
        reason="protocol-order",
        details={"type": msg.type.name, "source": source.name},
    )


class Endpoint(ABC):
    """
    Common behaviour: HELLO bookkeeping, parameter checks and ABORT.

    Subclasses name the peers that greet them in hello_peers and handle
    everything after the greeting in handle().
    """

    role: Role
    hello_peers: frozenset[Role] = frozenset()

    def __init__(self, config: SessionConfig, scheme: ExtractionScheme):
        self.config = config
        self.scheme = scheme
        self.rng = derive_rng(config.seed, int(self.role))
        self.status: SessionStatus | None = None
        self.closed = False
        self.restarts = 0
        self._greeted: set[Role] = set()

    @property
    def peers(self) -> list[Role]:
        return [r for r in Role if r != self.role]

    @property
    def finished(self) -> bool:
        return self.closed or isinstance(self.status, Aborted)

    def public_parameters(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme.tag,
            "n": self.scheme.n,
            "k": self.scheme.k,
            "raw_length": self.scheme.raw_length,
            "r": self.config.r,
        }

    def hello(self) -> WireMessage:
        return _message(MessageType.HELLO, role=self.role.name.lower(), **self.public_parameters())

    def receive(self, source: Role, frame: bytes) -> list[Outgoing]:
        """Decode one frame and react to it; protocol faults become ABORT."""
        if self.finished:
            return []
        try:
            return self.deliver(source, decode_frame(frame))
        except ProtocolError as e:
            logger.info("%s aborts: %s", self.role.name.lower(), e.message)
            return self.abort(e.reason)

    def deliver(self, source: Role, msg: WireMessage) -> list[Outgoing]:
        if msg.type == MessageType.ABORT:
            reason = msg.payload.get("reason")
            self.status = Aborted(reason if isinstance(reason, str) else "unknown", self.restarts)
            return []
        if msg.type == MessageType.HELLO:
            self._accept_hello(source, msg)
            return self.on_hello(source)
        if source in self.hello_peers and source not in self._greeted:
            raise _out_of_order(self.role, source, msg)
        return self.handle(source, msg)

    def _accept_hello(self, source: Role, msg: WireMessage) -> None:
        if source not in self.hello_peers or source in self._greeted:
            raise _out_of_order(self.role, source, msg)
        if msg.payload.get("role") != source.name.lower():
            raise ProtocolError("HELLO role does not match its route", reason="malformed-frame")
        theirs = {key: msg.payload.get(key) for key in self.public_parameters()}
        if theirs != self.public_parameters():
            raise ProtocolError(
                "Public parameters differ",
                reason="parameter-mismatch",
                details={"ours": self.public_parameters(), "theirs": theirs},
            )
        self._greeted.add(source)

    def abort(self, reason: str) -> list[Outgoing]:
        self.status = Aborted(reason, self.restarts)
        return [Outgoing(peer, _message(MessageType.ABORT, reason=reason)) for peer in self.peers]

    def on_hello(self, source: Role) -> list[Outgoing]:
        return []

    @abstractmethod
    def handle(self, source: Role, msg: WireMessage) -> list[Outgoing]:
        pass

    def _round(self, payload: dict[str, Any]) -> int:
        rnd = _field(payload, "round", int)
        if not 0 <= rnd < self.config.r:
            raise ProtocolError(f"Round {rnd} outside 0..{self.config.r - 1}", reason="malformed-frame")
        return rnd


class Bob(Endpoint):
    """Prepares the qubits, owns the database and encrypts it at the end."""

    role = Role.BOB
    hello_peers = frozenset({Role.ALICE})

    def __init__(self, config: SessionConfig, scheme: ExtractionScheme, strategy: BobStrategy):
        super().__init__(config, scheme)
        self.strategy = strategy
        self.database = Database.random(config.n, derive_rng(config.seed, int(self.role), DATABASE_STREAM))
        self._raw_bits: dict[int, np.ndarray] = {}
        self._attempts: dict[int, int] = {}
        self._shifted = False

    def on_hello(self, source: Role) -> list[Outgoing]:
        out = [Outgoing(Role.ALICE, self.hello()), Outgoing(Role.REFEREE, self.hello())]
        for rnd in range(self.config.r):
            out.extend(self._prepare_round(rnd))
        return out

    def _prepare_round(self, rnd: int) -> list[Outgoing]:
        prep = self.strategy.prepare(self.scheme.raw_length, self.rng)
        self._raw_bits[rnd] = prep.bob_bit
        attempt = self._attempts[rnd] = self._attempts.get(rnd, -1) + 1
        deposit = _message(
            MessageType.STATE_DEPOSIT,
            round=rnd,
            attempt=attempt,
            states=encode_octants(prep.sent),
        )
        announce = _message(
            MessageType.ANNOUNCE,
            round=rnd,
            attempt=attempt,
            lo=encode_octants(prep.ann_lo),
            hi=encode_octants(prep.ann_hi),
        )
        return [Outgoing(Role.REFEREE, deposit), Outgoing(Role.ALICE, announce)]

    def handle(self, source: Role, msg: WireMessage) -> list[Outgoing]:
        if source != Role.ALICE:
            raise _out_of_order(self.role, source, msg)
        if msg.type == MessageType.RESTART and not self._shifted:
            rnd = self._round(msg.payload)
            self.restarts += 1
            self.status = Restarted(self.restarts)
            logger.debug("bob redoes round %d (restart %d)", rnd, self.restarts)
            return self._prepare_round(rnd)
        if msg.type == MessageType.SHIFT and not self._shifted:
            return self._send_database(msg.payload)
        if msg.type == MessageType.DONE and self._shifted:
            self.closed = True
            return []
        raise _out_of_order(self.role, source, msg)

    def oblivious_key(self, dilution_shifts: list[int]) -> frozenbitarray:
        """Bob's final key for the given dilution shifts."""
        views = [
            ObliviousKeyView(
                bob_key=bits_from_array(self.scheme.window_xor(self._raw_bits[rnd].astype(np.uint8))),
                alice_known={},
                scheme=self.scheme.tag,
                k=self.scheme.k,
            )
            for rnd in range(self.config.r)
        ]
        return dilute(views, dilution_shifts).bob_key if len(views) > 1 else views[0].bob_key

    def _send_database(self, payload: dict[str, Any]) -> list[Outgoing]:
        shift = _field(payload, "shift", int)
        dilution_shifts = _field(payload, "dilution_shifts", list)
        if len(dilution_shifts) != self.config.r or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in dilution_shifts
        ):
            raise ProtocolError("Bad dilution shifts", reason="malformed-frame")
        self._shifted = True
        ok = self.oblivious_key(dilution_shifts)
        enc = encrypt_db(self.database.bits, ok, shift)
        return [Outgoing(Role.ALICE, _message(MessageType.ENC_DB, n=len(enc), bits=bits_to_base64(enc)))]


class Referee(Endpoint):
    """Holds deposited qubits and measures them as Alice asks, once per deposit."""

    role = Role.REFEREE
    hello_peers = frozenset({Role.ALICE, Role.BOB})

    def __init__(self, config: SessionConfig, scheme: ExtractionScheme):
        super().__init__(config, scheme)
        self._deposits: dict[int, np.ndarray] = {}

    def handle(self, source: Role, msg: WireMessage) -> list[Outgoing]:
        if source == Role.BOB and msg.type == MessageType.STATE_DEPOSIT:
            rnd = self._round(msg.payload)
            if rnd in self._deposits:
                raise _out_of_order(self.role, source, msg)
            states = decode_octants(_field(msg.payload, "states", str), self.scheme.raw_length)
            if states.size and (states.min() < 0 or states.max() > 7):
                raise ProtocolError("Deposit contains an unknown state", reason="malformed-frame")
            self._deposits[rnd] = states
            return []
        if source == Role.ALICE and msg.type == MessageType.MEASURE_REQUEST:
            return self._measure(msg)
        if source == Role.ALICE and msg.type == MessageType.DONE:
            self.closed = True
            return []
        raise _out_of_order(self.role, source, msg)

    def _measure(self, msg: WireMessage) -> list[Outgoing]:
        rnd = self._round(msg.payload)
        if rnd not in self._deposits:
            raise _out_of_order(self.role, Role.ALICE, msg)
        mode = _field(msg.payload, "mode", str)
        try:
            bases = None
            if mode == "basis":
                bases = bits_to_array(bits_from_base64(_field(msg.payload, "bases", str), self.scheme.raw_length))
            request = MeasurementRequest(mode, bases)
        except ValidationError as e:
            raise ProtocolError(e.message, reason="malformed-frame") from e
        outcomes = referee_measure(self._deposits.pop(rnd), request, self.rng)
        return [Outgoing(Role.ALICE, _message(MessageType.MEASURE_RESULT, round=rnd, outcomes=encode_octants(outcomes)))]


class Alice(Endpoint):
    """
    Measures through the Referee, builds her partial keys, restarts empty
    rounds, picks the dilution shifts and finally retrieves one database bit.
    """

    role = Role.ALICE
    hello_peers = frozenset({Role.BOB})

    def __init__(self, config: SessionConfig, scheme: ExtractionScheme, strategy: AliceStrategy):
        super().__init__(config, scheme)
        self.strategy = strategy
        self.keys: dict[int, dict[int, int]] = {}
        self.final_known: dict[int, int] = {}
        self.dilution_shifts: list[int] = []
        self.db_index: int | None = None
        self.key_index: int | None = None
        self._announcements: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._shift_sent = False

    def start(self) -> list[Outgoing]:
        return [Outgoing(Role.BOB, self.hello())]

    def on_hello(self, source: Role) -> list[Outgoing]:
        return [Outgoing(Role.REFEREE, self.hello())]

    def handle(self, source: Role, msg: WireMessage) -> list[Outgoing]:
        if source == Role.BOB and msg.type == MessageType.ANNOUNCE and not self._shift_sent:
            return self._request(msg)
        if source == Role.REFEREE and msg.type == MessageType.MEASURE_RESULT:
            return self._evaluate(msg)
        if source == Role.BOB and msg.type == MessageType.ENC_DB and self._shift_sent:
            return self._retrieve(msg.payload)
        raise _out_of_order(self.role, source, msg)

    def _request(self, msg: WireMessage) -> list[Outgoing]:
        rnd = self._round(msg.payload)
        if rnd in self.keys or rnd in self._announcements:
            raise _out_of_order(self.role, Role.BOB, msg)
        length = self.scheme.raw_length
        lo = decode_octants(_field(msg.payload, "lo", str), length)
        hi = decode_octants(_field(msg.payload, "hi", str), length)
        self._announcements[rnd] = (lo, hi)
        request = self.strategy.request(length, self.rng)
        bases = bits_to_base64(bits_from_array(request.bases)) if request.bases is not None else None
        return [Outgoing(Role.REFEREE, _message(MessageType.MEASURE_REQUEST, round=rnd, mode=request.mode, bases=bases))]

    def _evaluate(self, msg: WireMessage) -> list[Outgoing]:
        rnd = self._round(msg.payload)
        if rnd not in self._announcements:
            raise _out_of_order(self.role, Role.REFEREE, msg)
        outcomes = decode_octants(_field(msg.payload, "outcomes", str), self.scheme.raw_length)
        lo, hi = self._announcements.pop(rnd)
        try:
            verdicts = self.strategy.evaluate(outcomes, lo, hi)
        except (ValidationError, IndexError) as e:
            raise ProtocolError(f"Cannot evaluate round {rnd}: {e}", reason="malformed-frame") from e

        conclusive = verdicts <= VerdictCode.CONCLUSIVE_1
        known = np.flatnonzero(self.scheme.known_mask(conclusive))
        if known.size == 0:
            return self._restart(rnd)
        values = self.scheme.window_xor(np.where(conclusive, verdicts, 0).astype(np.uint8))
        self.keys[rnd] = dict(zip(known.tolist(), values[known].tolist()))
        logger.debug("alice round %d known=%d", rnd, known.size)
        if len(self.keys) == self.config.r:
            return self._choose()
        return []

    def _restart(self, rnd: int) -> list[Outgoing]:
        self.restarts += 1
        if self.restarts > self.config.restart_cap:
            return self.abort("restart-cap")
        self.status = Restarted(self.restarts)
        return [Outgoing(Role.BOB, _message(MessageType.RESTART, round=rnd))]

    def _choose(self) -> list[Outgoing]:
        n = self.scheme.n
        maps = [self.keys[rnd] for rnd in range(self.config.r)]
        if len(maps) == 1:
            shifts = [0]
        else:
            shifts = greedy_dilution_shifts([m.keys() for m in maps], n).shifts
        final = combine_known(maps, shifts, n)
        if not final:
            # the last key cancelled every survivor; redo it
            last = self.config.r - 1
            del self.keys[last]
            return self._restart(last)

        known = list(final)
        j = known[int(self.rng.integers(len(known)))]
        b = self.config.db_index if self.config.db_index is not None else int(self.rng.integers(n))
        self.final_known = final
        self.dilution_shifts = [int(s) for s in shifts]
        self.key_index = j
        self.db_index = b
        self._shift_sent = True
        shift = _message(MessageType.SHIFT, shift=announce_shift(j, b, n), dilution_shifts=self.dilution_shifts)
        return [Outgoing(Role.BOB, shift)]

    def _retrieve(self, payload: dict[str, Any]) -> list[Outgoing]:
        n = _field(payload, "n", int)
        if n != self.scheme.n:
            raise ProtocolError(f"Encrypted database has {n} bits", reason="malformed-frame")
        try:
            enc = bits_from_base64(_field(payload, "bits", str), n)
        except ValidationError as e:
            raise ProtocolError(e.message, reason="malformed-frame") from e
        bit = decrypt_bit(enc, self.db_index, self.final_known[self.key_index])
        self.status = Completed(bit, self.restarts)
        self.closed = True
        done = _message(MessageType.DONE, restarts=self.restarts)
        return [Outgoing(Role.BOB, done), Outgoing(Role.REFEREE, done)]
