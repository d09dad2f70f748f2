"""Seeded random streams.

Every stochastic quantity is drawn from a numpy ``Generator`` backed by
PCG64 (numpy's default bit generator, stream-stable since numpy 1.17). The
generator is built from ``SeedSequence(master_seed, spawn_key=(replication,
purpose))``, so streams are a pure function of the key and distinct keys give
independent streams.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

RNG_ALGORITHM = "numpy.PCG64/SeedSequence"


class Purpose(IntEnum):
    """Purpose tags partitioning the stream space of one replication."""

    STATES = 0
    CHERNOFF = 1
    TRANSIENT = 2


@dataclass(frozen=True)
class StreamKey:
    master_seed: int
    replication_index: int = 0
    purpose_tag: int = Purpose.STATES

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.replication_index < 0 or self.purpose_tag < 0:
            raise ValueError("replication_index and purpose_tag must be non-negative")

    def replicate(self, index: int) -> "StreamKey":
        return StreamKey(self.master_seed, index, self.purpose_tag)

    def with_purpose(self, tag: int) -> "StreamKey":
        return StreamKey(self.master_seed, self.replication_index, int(tag))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.replication_index, int(self.purpose_tag))
        )
        return np.random.Generator(np.random.PCG64(seq))
