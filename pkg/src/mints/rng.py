"""Counter-based random streams with deterministic splitting.

Built on numpy's Philox generator: the (seed, stream) pair is the 128-bit
Philox key, so substreams for parallel replications are independent by
construction and a run is reproducible from (seed, call sequence) alone.
"""

from __future__ import annotations

import numpy as np

_ROOT_STREAM = np.uint64(0xFFFFFFFFFFFFFFFF)  # reserved stream id of the root


class RngStream:
    """One independent random stream identified by (seed, stream id).

    Identical seed and identical call sequence give bit-identical draws.
    ``categorical`` consumes exactly one uniform variate.
    """

    __slots__ = ("seed", "stream", "_gen")

    def __init__(self, seed: int, stream: int | None = None):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        self.seed = int(seed)
        self.stream = int(_ROOT_STREAM) if stream is None else int(stream)
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def split(self, index: int) -> "RngStream":
        """Independent substream keyed by a replication index."""
        if not 0 <= index < int(_ROOT_STREAM):
            raise ValueError("split index out of range")
        return RngStream(self.seed, index)

    # -- draws ------------------------------------------------------------

    def uniform(self, size=None):
        """Uniform on [0, 1)."""
        return self._gen.random(size)

    def normal(self, size=None):
        """Standard normal."""
        return self._gen.standard_normal(size)

    def bernoulli(self, p: float) -> int:
        """One Bernoulli(p) draw, consuming one uniform."""
        return int(self._gen.random() < p)

    def categorical(self, weights) -> int:
        """Index i with probability weights[i]; consumes one uniform.

        Weights must be nonnegative and sum to a positive value.
        """
        w = np.asarray(weights, dtype=float)
        cum = np.cumsum(w)
        total = cum[-1]
        if not total > 0.0:
            raise ValueError("categorical weights must have positive sum")
        u = self._gen.random() * total
        return int(min(np.searchsorted(cum, u, side="right"), len(w) - 1))

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator, for bulk draws."""
        return self._gen

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream={self.stream})"
