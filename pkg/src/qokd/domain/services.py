"""
Domain service interfaces for QOKD.

Strategies for the two parties and the key extraction schemes are defined
here as abstract base classes. The exchange, the session roles and the
analytics all work against these interfaces.
"""

from abc import ABC, abstractmethod

import numpy as np

from qokd.core.exceptions import SchemeMismatchError
from qokd.core.rng import RandomStream
from qokd.domain.entities import KeyBitDefinition, MeasurementRequest, Preparation

__all__ = [
    "BobStrategy",
    "AliceStrategy",
    "ExtractionScheme",
]


class BobStrategy(ABC):
    """
    How Bob prepares qubits and announces state pairs.

    The same preparation feeds the local exchange and the session referee.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Short name used in transcripts and reports."""
        pass

    @abstractmethod
    def prepare(self, n: int, rng: RandomStream) -> Preparation:
        """
        Prepare n rounds.

        Args:
            n: Number of qubits
            rng: Bob's random stream

        Returns:
            Sent states, announcements and Bob's bits (-1 where undefined)
        """
        pass


class AliceStrategy(ABC):
    """
    How Alice measures and judges her qubits.

    The work is split in two so the session can route it: request() is what
    the channel is asked to do, evaluate() turns outcomes and announcements
    into verdict codes.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def request(self, n: int, rng: RandomStream) -> MeasurementRequest:
        pass

    @abstractmethod
    def evaluate(self, outcomes: np.ndarray, ann_lo: np.ndarray, ann_hi: np.ndarray) -> np.ndarray:
        """
        Judge outcomes against the announced pairs.

        Returns:
            VerdictCode array of the same length
        """
        pass


class ExtractionScheme(ABC):
    """
    A rule that turns a raw key into an N-bit oblivious key.

    Key bit j is the XOR of the raw positions in definition(j). Alice knows
    it exactly when all of those positions are conclusive.
    """

    #: Short scheme name, also the binary tag source
    tag: str = ""

    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n

    @property
    @abstractmethod
    def raw_length(self) -> int:
        """Raw-key length the scheme consumes."""
        pass

    @abstractmethod
    def definition(self, j: int) -> KeyBitDefinition:
        pass

    @abstractmethod
    def window_sums(self, mask: np.ndarray) -> np.ndarray:
        """Per key bit, how many of its raw positions are set in mask."""
        pass

    @abstractmethod
    def window_xor(self, bits: np.ndarray) -> np.ndarray:
        """Key bits (uint8 array of length n) computed from raw bits."""
        pass

    def known_mask(self, conclusive: np.ndarray) -> np.ndarray:
        """Boolean array over key indices: which bits Alice knows."""
        return self.window_sums(conclusive) == self.k

    def window_count(self, conclusive: np.ndarray) -> int:
        """Number of key bits fully inside the conclusive mask."""
        return int(np.count_nonzero(self.known_mask(conclusive)))

    def check_raw_length(self, length: int) -> None:
        if length != self.raw_length:
            raise SchemeMismatchError(
                f"{self.tag} scheme needs a raw key of length {self.raw_length}, got {length}",
                scheme=self.tag,
                expected=self.raw_length,
                actual=length,
            )

    def describe(self) -> dict[str, int | str]:
        return {"scheme": self.tag, "n": self.n, "k": self.k, "raw_length": self.raw_length}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, n={self.n})"
