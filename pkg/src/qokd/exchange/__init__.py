"""
SARG04 raw-key exchange: party strategies, the round simulator and the
transcript line format.
"""

from qokd.exchange.strategies import (
    HonestBob,
    BiasBob,
    HonestImmediateAlice,
    UsdIndividualAlice,
    split_attack_positions,
    make_alice,
    make_bob,
)
from qokd.exchange.exchange import (
    GuessStats,
    run_exchange,
    referee_measure,
    bias_conclusive_probability,
    guess_accuracy_stats,
)
from qokd.exchange.records import (
    format_record,
    parse_record,
    write_transcript,
    read_transcript,
    dump_transcript,
    load_transcript,
)

__all__ = [
    "HonestBob",
    "BiasBob",
    "HonestImmediateAlice",
    "UsdIndividualAlice",
    "split_attack_positions",
    "make_alice",
    "make_bob",
    "GuessStats",
    "run_exchange",
    "referee_measure",
    "bias_conclusive_probability",
    "guess_accuracy_stats",
    "format_record",
    "parse_record",
    "write_transcript",
    "read_transcript",
    "dump_transcript",
    "load_transcript",
]
