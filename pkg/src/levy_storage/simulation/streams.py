"""streams.py: Independent, reproducible random streams.

A stream is a numpy Generator over the counter-based Philox bit generator, keyed by the 64-bit experiment seed and a
tuple of nonnegative integers. Replication r of an experiment uses the key (r, purpose), so adding replications never
changes the streams of the existing ones.
"""

import numpy as np

from ..schema.exceptions import DomainError

# Purposes of the second key component
PATH_STREAM = 0
PROBE_STREAM = 1
INIT_STREAM = 2


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for (seed, key); equal arguments give bit-identical draws."""
    if seed < 0 or seed >= 2 ** 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(key))))
