"""Deterministic random-number streams.

Every stochastic operation in the package derives its draws from an
:class:`RngStream`, a frozen (seed, stream_id) pair. Calling
:meth:`RngStream.generator` always rebuilds the generator from scratch, so
an operation given the same stream is bit-reproducible no matter how often
or in which order it runs. Substreams for trajectories, chunks, or purposes
are derived with :meth:`child`, which extends the underlying spawn key.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id [, subkeys])."""

    seed: int
    stream_id: int = 0
    subkeys: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        """Fresh generator; identical streams yield identical sequences."""
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *self.subkeys)
        )
        return np.random.default_rng(seq)

    def child(self, *keys: int) -> "RngStream":
        """Derive an independent substream (per trajectory, chunk, purpose...)."""
        return RngStream(self.seed, self.stream_id, self.subkeys + keys)


def as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    """Accept either a stream spec (pure, rebuilt) or a live generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")
