"""
Guessing statistics for key bits Alice does not know.
"""

from typing import Iterable, NamedTuple

import numpy as np

from qokd.core.exceptions import ValidationError
from qokd.domain.entities import ObliviousKeyView

__all__ = ["GroupAccuracy", "guess_prob_group", "group_guess_accuracy"]


class GroupAccuracy(NamedTuple):
    x: int
    groups: int
    hits: int
    rate: float
    expected: float


def guess_prob_group(x: int) -> float:
    """
    Chance that Alice's guess of a key bit is right when x of its qubits
    were inconclusive, (3^x + 1) / (2 * 3^x).

    Each inconclusive guess is right with probability 2/3, and the XOR of x
    such guesses is right when an even number of them are wrong.

    Examples:
        guess_prob_group(1) == 2/3
        guess_prob_group(2) == 5/9

    Raises:
        ValidationError: If x < 1 (the bit is known, not guessed)
    """
    if x < 1:
        raise ValidationError("Group guess needs at least one inconclusive qubit", parameter="x", value=x)
    return (1.0 + 3.0 ** (-x)) / 2.0


def group_guess_accuracy(views: Iterable[ObliviousKeyView], max_x: int | None = None) -> dict[int, GroupAccuracy]:
    """
    Empirical hit rate of Alice's key-bit guesses, by inconclusive count x.

    Guesses with confidence 1/2 (no usable guess) and unreliable key bits
    are skipped.

    Raises:
        ValidationError: If a view was extracted without guesses
    """
    groups: dict[int, int] = {}
    hits: dict[int, int] = {}
    for view in views:
        if view.alice_guesses is None:
            raise ValidationError("Key view has no guesses; extract with with_guesses=True", parameter="views")
        if not view.alice_guesses:
            continue
        j = np.fromiter(view.alice_guesses.keys(), dtype=np.int64)
        guess = np.fromiter((g.bit for g in view.alice_guesses.values()), dtype=np.int8)
        x = np.fromiter((g.unknown_count for g in view.alice_guesses.values()), dtype=np.int32)
        usable = np.fromiter((g.confidence != 0.5 for g in view.alice_guesses.values()), dtype=bool)
        if view.unreliable is not None:
            usable &= ~np.array(view.unreliable.tolist(), dtype=bool)[j]
        bob = np.array(view.bob_key.tolist(), dtype=np.int8)[j]
        for value in np.unique(x[usable]).tolist():
            if max_x is not None and value > max_x:
                continue
            sel = usable & (x == value)
            groups[value] = groups.get(value, 0) + int(np.count_nonzero(sel))
            hits[value] = hits.get(value, 0) + int(np.count_nonzero(guess[sel] == bob[sel]))
    return {
        x: GroupAccuracy(x, groups[x], hits[x], hits[x] / groups[x], guess_prob_group(x))
        for x in sorted(groups)
    }
