"""Reproducible random-number streams.

Every sampler in this package takes an :class:`RngStream`.  A stream is
identified by a 64-bit master seed plus a stream id (typically a replica-block
index); identical identifiers always reproduce identical draws, and distinct
ids yield statistically independent generators via ``SeedSequence`` spawn keys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Addressable source of pseudo-randomness.

    ``seed`` is the experiment-level master seed, ``stream_id`` the replica
    (or replica-block) index.  ``substream`` derives further independent
    streams for internal decompositions without consuming any draws.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if not (0 <= int(self.stream_id) < 2**64):
            raise ValueError("stream_id must fit in 64 bits")

    def generator(self, *subkeys: int) -> np.random.Generator:
        """Return a fresh Generator for this stream (optionally sub-keyed)."""
        seq = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id), *map(int, subkeys))
        )
        return np.random.default_rng(seq)

    def substream(self, *subkeys: int) -> "RngStream":
        """Derive a child stream; children with distinct keys are independent."""
        seq = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id), *map(int, subkeys))
        )
        # Fold the spawn key into a fresh 64-bit seed so the child is again
        # a plain (seed, stream_id) pair.
        child_seed = int(seq.generate_state(1, dtype=np.uint64)[0])
        return RngStream(seed=child_seed, stream_id=0)


BLOCK_SIZE = 1024
"""Replicas per vectorized block.

Fixed independently of the worker count so that experiment outputs are
bitwise identical for any degree of parallelism.  Block ``b`` of an
experiment draws from ``stream.generator(tag, b)`` and results are reduced
in block order.
"""


def iter_blocks(total: int, block_size: int = BLOCK_SIZE):
    """Yield ``(block_index, start, count)`` covering ``range(total)``."""
    b = 0
    start = 0
    while start < total:
        count = min(block_size, total - start)
        yield b, start, count
        b += 1
        start += count
