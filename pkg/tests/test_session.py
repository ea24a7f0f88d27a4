"""
Tests for the wire format, the oblivious-transfer step and full sessions.
"""

import json

import pytest
from bitarray import frozenbitarray

from qokd.application.ports import Transport
from qokd.core.exceptions import ProtocolError, ValidationError
from qokd.core.limits import LimitExceededError
from qokd.domain.entities import Aborted, Completed, Role, SessionConfig
from qokd.infrastructure.transports import LoopbackTransport, TcpTransport, make_transport
from qokd.session import (
    WIRE_VERSION,
    MessageType,
    WireMessage,
    announce_shift,
    build_endpoints,
    decode_frame,
    decrypt_bit,
    encode_frame,
    encrypt_db,
    replay_session,
    run_session,
)
from qokd.session.wire import HEADER_SIZE, decode_octants, encode_octants


class TamperingTransport(LoopbackTransport):
    """Loopback transport that rewrites the first frame matching a route and type."""

    def __init__(self, route, msg_type, rewrite):
        super().__init__()
        self.route = route
        self.msg_type = msg_type
        self.rewrite = rewrite
        self.tampered = False

    def send(self, source, destination, frame):
        if not self.tampered and (source, destination) == self.route and frame[5] == int(self.msg_type):
            frame = self.rewrite(bytearray(frame))
            self.tampered = True
        super().send(source, destination, bytes(frame))


def _set_byte(index, value):
    def rewrite(frame):
        frame[index] = value
        return frame
    return rewrite


class TestWire:
    """Tests for frames."""

    def test_layout(self):
        frame = encode_frame(WireMessage(MessageType.SHIFT, {"shift": 3}))
        assert len(frame) == HEADER_SIZE + len(b'{"shift":3}')
        assert frame[:4] == len(b'{"shift":3}').to_bytes(4, "big")
        assert frame[4] == WIRE_VERSION
        assert frame[5] == MessageType.SHIFT
        assert frame[HEADER_SIZE:] == b'{"shift":3}'

    def test_canonical_payload(self):
        a = encode_frame(WireMessage(MessageType.HELLO, {"b": 1, "a": 2}))
        b = encode_frame(WireMessage(MessageType.HELLO, {"a": 2, "b": 1}))
        assert a == b

    def test_decode(self):
        msg = WireMessage(MessageType.DONE, {"restarts": 2})
        assert decode_frame(encode_frame(msg)) == msg

    def test_version_mismatch(self):
        frame = bytearray(encode_frame(WireMessage(MessageType.DONE, {})))
        frame[4] = 0x02
        with pytest.raises(ProtocolError) as exc:
            decode_frame(bytes(frame))
        assert exc.value.reason == "version-mismatch"

    @pytest.mark.parametrize("mutate", [
        lambda f: f[:-1],
        lambda f: f[:3],
        lambda f: f[:5] + bytes([99]) + f[6:],
        lambda f: f[:HEADER_SIZE] + b"[1,2" + f[HEADER_SIZE + 4:],
    ])
    def test_malformed(self, mutate):
        frame = encode_frame(WireMessage(MessageType.DONE, {"x": 1}))
        with pytest.raises(ProtocolError) as exc:
            decode_frame(mutate(frame))
        assert exc.value.reason == "malformed-frame"

    def test_non_object_payload(self):
        frame = len(b"[1]").to_bytes(4, "big") + bytes([WIRE_VERSION, MessageType.DONE]) + b"[1]"
        with pytest.raises(ProtocolError) as exc:
            decode_frame(frame)
        assert exc.value.reason == "malformed-frame"

    def test_frame_too_large(self):
        with pytest.raises(LimitExceededError):
            encode_frame(WireMessage(MessageType.DONE, {"pad": "x" * 100}), max_bytes=50)
        frame = encode_frame(WireMessage(MessageType.DONE, {"pad": "x" * 100}))
        with pytest.raises(ProtocolError) as exc:
            decode_frame(frame, max_bytes=50)
        assert exc.value.reason == "frame-too-large"

    def test_octants(self):
        text = encode_octants([0, 2, 4, 6, -1])
        assert decode_octants(text, 5).tolist() == [0, 2, 4, 6, -1]
        with pytest.raises(ProtocolError):
            decode_octants(text, 4)
        with pytest.raises(ProtocolError):
            decode_octants("***", 1)


class TestObliviousTransfer:
    """Tests for the shift / encrypt / decrypt step."""

    def test_shift_examples(self):
        assert announce_shift(7, 3, 10) == 4
        assert announce_shift(2, 9, 10) == 3

    def test_alice_recovers_wanted_bit(self):
        db = frozenbitarray("1011001110", endian="little")
        ok = frozenbitarray("0110100101", endian="little")
        for j in range(10):
            for b in range(10):
                enc = encrypt_db(db, ok, announce_shift(j, b, 10))
                assert decrypt_bit(enc, b, ok[j]) == db[b]

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            encrypt_db(frozenbitarray("101"), frozenbitarray("10"), 0)

    def test_index_checked(self):
        with pytest.raises(ValidationError):
            decrypt_bit(frozenbitarray("101"), 3, 0)


class TestSessions:
    """Tests for full sessions over the loopback transport."""

    def test_completes_correctly(self, session_config):
        outcome = run_session(session_config)
        assert isinstance(outcome.status, Completed)
        assert outcome.correct is True
        assert outcome.status.retrieved_bit == outcome.expected_bit

    def test_message_sequence(self, session_config):
        transcript = run_session(session_config).transcript
        types = [e.message.type for e in transcript]
        assert types[0] == MessageType.HELLO
        assert transcript.entries[0].source == Role.ALICE
        assert transcript.count(MessageType.HELLO) == 4
        assert types.index(MessageType.SHIFT) < types.index(MessageType.ENC_DB) < types.index(MessageType.DONE)
        assert transcript.count(MessageType.DONE) == 2
        rounds = transcript.count(MessageType.MEASURE_RESULT)
        assert rounds == 1 + transcript.status.restarts
        referee_types = {m.type for m in transcript.inbox(Role.REFEREE)}
        assert referee_types == {
            MessageType.HELLO, MessageType.STATE_DEPOSIT, MessageType.MEASURE_REQUEST, MessageType.DONE,
        }
        assert MessageType.STATE_DEPOSIT not in {m.type for m in transcript.inbox(Role.ALICE)}
        bob_types = {m.type for m in transcript.inbox(Role.BOB)}
        assert not bob_types & {MessageType.MEASURE_REQUEST, MessageType.MEASURE_RESULT}

    @pytest.mark.parametrize("seed", range(8))
    def test_correct_for_many_seeds(self, seed):
        outcome = run_session(SessionConfig(n=600, k=3, seed=seed))
        assert outcome.correct is True

    @pytest.mark.parametrize("scheme,n,k,m", [
        ("original", 200, 2, None),
        ("generalized", 300, 3, None),
        ("generalized", 300, 3, 20),
    ])
    def test_other_schemes(self, scheme, n, k, m):
        outcome = run_session(SessionConfig(scheme=scheme, n=n, k=k, m=m, seed=3))
        assert outcome.correct is True

    def test_dilution_rounds(self):
        outcome = run_session(SessionConfig(n=2000, k=2, r=3, seed=5))
        assert outcome.correct is True
        assert outcome.transcript.count(MessageType.ANNOUNCE) >= 3
        shift = next(e.message for e in outcome.transcript if e.message.type == MessageType.SHIFT)
        assert len(shift.payload["dilution_shifts"]) == 3
        assert shift.payload["dilution_shifts"][0] == 0

    def test_fixed_database_index(self):
        outcome = run_session(SessionConfig(n=800, k=3, seed=9, db_index=17))
        assert outcome.db_index == 17
        assert outcome.correct is True

    def test_usd_alice_still_retrieves(self):
        outcome = run_session(SessionConfig(n=800, k=3, alice="usd", seed=2))
        assert outcome.correct is True

    def test_deterministic(self, session_config):
        a = run_session(session_config).transcript
        b = run_session(session_config).transcript
        assert a.to_jsonl() == b.to_jsonl()
        assert replay_session(session_config, a)

    def test_jsonl_lines(self, session_config):
        transcript = run_session(session_config).transcript
        lines = transcript.to_jsonl().splitlines()
        assert len(lines) == len(transcript) + 1
        first = json.loads(lines[0])
        assert (first["src"], first["dst"], first["type"]) == ("alice", "bob", "HELLO")
        assert json.loads(lines[-1])["status"] == "completed"

    def test_restart_cap(self):
        outcome = run_session(SessionConfig(n=10, k=10, restart_cap=0, seed=1))
        assert isinstance(outcome.status, Aborted)
        assert outcome.status.reason == "restart-cap"
        assert outcome.correct is None
        assert outcome.transcript.count(MessageType.ABORT) == 2

    def test_restarts_then_abort(self):
        outcome = run_session(SessionConfig(n=10, k=10, restart_cap=2, seed=1))
        assert outcome.status.reason == "restart-cap"
        assert outcome.transcript.count(MessageType.RESTART) == 2
        assert outcome.transcript.count(MessageType.MEASURE_RESULT) == 3

    def test_version_mismatch_aborts(self, session_config):
        transport = TamperingTransport((Role.BOB, Role.REFEREE), MessageType.STATE_DEPOSIT, _set_byte(4, 0x07))
        outcome = run_session(session_config, transport)
        assert isinstance(outcome.status, Aborted)
        assert outcome.status.reason == "version-mismatch"
        assert transport.tampered

    def test_protocol_order_aborts(self, session_config):
        # an ANNOUNCE relabelled as ENC_DB reaches Alice before any SHIFT
        transport = TamperingTransport((Role.BOB, Role.ALICE), MessageType.ANNOUNCE, _set_byte(5, MessageType.ENC_DB))
        outcome = run_session(session_config, transport)
        assert outcome.status.reason == "protocol-order"

    def test_biased_bob_rejected(self):
        with pytest.raises(ValidationError):
            run_session(SessionConfig(bob="bias"))

    def test_bad_database_index(self):
        with pytest.raises(ValidationError):
            run_session(SessionConfig(n=100, k=3, db_index=100))

    def test_step_limit(self, session_config):
        outcome = run_session(session_config, max_steps=3)
        assert outcome.status.reason == "step-limit"


class TestEndpoints:
    """Tests for single endpoints fed by hand."""

    def test_message_before_hello(self, session_config):
        parties = build_endpoints(session_config)
        frame = encode_frame(WireMessage(MessageType.MEASURE_REQUEST, {"round": 0, "mode": "usd"}))
        replies = parties.referee.receive(Role.ALICE, frame)
        assert parties.referee.status == Aborted("protocol-order", 0)
        assert {r.destination for r in replies} == {Role.ALICE, Role.BOB}
        assert all(r.message.payload["reason"] == "protocol-order" for r in replies)

    def test_parameter_mismatch(self, session_config):
        parties = build_endpoints(session_config)
        other = build_endpoints(SessionConfig(n=1000, k=5, seed=11))
        replies = parties.bob.receive(Role.ALICE, encode_frame(other.alice.hello()))
        assert parties.bob.status.reason == "parameter-mismatch"
        assert len(replies) == 2

    def test_ignores_after_abort(self, session_config):
        parties = build_endpoints(session_config)
        parties.bob.abort("restart-cap")
        assert parties.bob.receive(Role.ALICE, encode_frame(parties.alice.hello())) == []


class TestTransports:
    """Tests for the transport adapters."""

    def test_loopback_fifo(self):
        with LoopbackTransport() as transport:
            transport.send(Role.ALICE, Role.BOB, b"one")
            transport.send(Role.ALICE, Role.BOB, b"two")
            assert transport.receive(Role.ALICE, Role.BOB) == b"one"
            assert transport.receive(Role.ALICE, Role.BOB) == b"two"
            with pytest.raises(ProtocolError) as exc:
                transport.receive(Role.ALICE, Role.BOB)
            assert exc.value.reason == "transport-empty"

    def test_both_satisfy_port(self):
        assert isinstance(LoopbackTransport(), Transport)
        assert isinstance(TcpTransport(), Transport)

    def test_make_transport(self):
        assert make_transport("inproc").name == "inproc"
        assert make_transport("tcp").name == "tcp"
        with pytest.raises(ValidationError):
            make_transport("carrier-pigeon")

    def test_tcp_routes(self):
        with TcpTransport(timeout=5.0) as transport:
            frame = encode_frame(WireMessage(MessageType.DONE, {"restarts": 0}))
            transport.send(Role.REFEREE, Role.ALICE, frame)
            assert transport.receive(Role.REFEREE, Role.ALICE) == frame
            assert transport.port > 0

    def test_tcp_timeout(self):
        with TcpTransport(timeout=0.2) as transport:
            with pytest.raises(ProtocolError) as exc:
                transport.receive(Role.ALICE, Role.BOB)
            assert exc.value.reason == "transport-timeout"

    def test_tcp_matches_loopback(self, session_config):
        """Both transports give byte-identical transcripts."""
        local = run_session(session_config, LoopbackTransport()).transcript
        remote = run_session(session_config, TcpTransport()).transcript
        assert local.digest() == remote.digest()
        assert remote.completed
