"""
Seeded random streams.

Every stochastic component takes an explicit numpy Generator. Streams for
independent runs and roles are derived from (master_seed, *path) through
SeedSequence, so results do not depend on execution order.
"""

import numpy as np

__all__ = ["RandomStream", "derive_rng", "derive_seed"]

RandomStream = np.random.Generator


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """
    Build a generator for the stream identified by (master_seed, *path).

    Example:
        rng = derive_rng(42, run_index)
        alice_rng = derive_rng(42, run_index, ROLE_ALICE)
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, path)]))


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive a plain 63-bit integer seed for a sub-run."""
    state = np.random.SeedSequence([int(master_seed), *map(int, path)]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
