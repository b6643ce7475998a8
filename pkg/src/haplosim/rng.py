"""Seedable random sampling primitives.

All randomness in the package flows through a :class:`RandomStream`, a thin
wrapper around numpy's PCG64 generator with keyed substream derivation.  Two
streams built from the same (seed, key) produce bit-identical draw sequences
within one build of the package; streams with different keys are independent
for practical purposes.

Module-level functions (`poisson`, `multinomial`, `categorical`) validate
their parameters and delegate to the underlying generator.  `AliasSampler`
provides amortized O(1) categorical draws after O(K) preprocessing, used for
row selection from large mutation tables.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "RandomStream",
    "AliasSampler",
    "poisson",
    "multinomial",
    "categorical",
]

_PROB_SUM_TOL = 1e-9


class RandomStream:
    """A seeded random stream with keyed substream derivation.

    A stream is identified by its 64-bit seed plus a tuple of substream
    indices (the derivation key).  ``RandomStream(seed).substream(i)`` yields
    the stream keyed ``(i,)``; derivation nests, so replicates and internal
    engine substreams can each get their own independent stream.

    A stream is single-owner: do not share one instance across threads.
    """

    __slots__ = ("seed", "key", "gen")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        if not (0 <= int(seed) < 2**64):
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> "RandomStream":
        """Derive the child stream keyed by appending `index`."""
        return RandomStream(self.seed, self.key + (int(index),))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key})"


def poisson(stream: RandomStream, lam: float) -> int:
    """Draw from Poisson(lam).

    `lam` may be anything from 0 (degenerate at zero) up to at least 1e9;
    numpy switches to a rejection sampler for large means.
    """
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0.0:
        raise InvalidParameterError(f"poisson mean must be finite and >= 0, got {lam}")
    return int(stream.gen.poisson(lam))


def multinomial(stream: RandomStream, n: int, probs) -> np.ndarray:
    """Draw category counts for `n` trials with the given probabilities.

    The returned int64 vector always sums to exactly `n`.  `probs` must be
    non-negative and sum to 1 within 1e-9; it is renormalized before
    sampling so that boundary rounding never trips numpy's own check.
    """
    n = int(n)
    if n < 0:
        raise InvalidParameterError(f"number of trials must be >= 0, got {n}")
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InvalidParameterError("probs must be a non-empty 1-D vector")
    if np.any(~np.isfinite(p)) or np.any(p < 0.0):
        raise InvalidParameterError("probs must be finite and non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > _PROB_SUM_TOL:
        raise InvalidParameterError(f"probs must sum to 1 within {_PROB_SUM_TOL}, got {total!r}")
    return stream.gen.multinomial(n, p / total)


class AliasSampler:
    """Constant-time categorical sampler (Vose alias preprocessing).

    Builds the alias and acceptance tables once in O(K); each draw then
    costs two uniforms and two table lookups.  Instances are immutable
    after construction and safe to share across threads; the stream passed
    to the draw methods supplies all randomness.
    """

    __slots__ = ("n", "_k", "_accept", "_alias", "_index")

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidParameterError("weights must be a non-empty 1-D vector")
        if np.any(~np.isfinite(w)) or np.any(w < 0.0):
            raise InvalidParameterError("weights must be finite and non-negative")
        total = float(w.sum())
        if total <= 0.0:
            raise InvalidParameterError("at least one weight must be positive")
        self.n = w.size
        # Zero-weight cells are stripped so they can never be drawn; the
        # alias tables cover positive cells only and `_index` maps back.
        positive = np.flatnonzero(w > 0.0)
        self._index = None if positive.size == self.n else positive
        w = w[positive]
        k = w.size
        scaled = w * (k / total)
        accept = np.ones(k, dtype=np.float64)
        alias = np.arange(k, dtype=np.int64)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            accept[s] = scaled[s]
            alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)
        # Leftovers on either stack hold mass 1.0 up to rounding.
        for s in small:
            accept[s] = 1.0
        self._k = k
        self._accept = accept
        self._alias = alias

    def draw(self, stream: RandomStream) -> int:
        """Draw one category index."""
        gen = stream.gen
        i = int(gen.random() * self._k)
        if i >= self._k:  # guard the u -> 1 edge after float scaling
            i = self._k - 1
        if gen.random() >= self._accept[i]:
            i = int(self._alias[i])
        if self._index is not None:
            i = int(self._index[i])
        return i

    def draw_many(self, stream: RandomStream, size: int) -> np.ndarray:
        """Draw `size` iid category indices as an int64 vector."""
        size = int(size)
        if size < 0:
            raise InvalidParameterError(f"size must be >= 0, got {size}")
        gen = stream.gen
        idx = (gen.random(size) * self._k).astype(np.int64)
        np.clip(idx, 0, self._k - 1, out=idx)
        reject = gen.random(size) >= self._accept[idx]
        idx[reject] = self._alias[idx[reject]]
        if self._index is not None:
            idx = self._index[idx]
        return idx


def categorical(stream: RandomStream, weights=None, prepared: AliasSampler | None = None) -> int:
    """Draw an index with probability proportional to its weight.

    Pass `prepared` (built once via :class:`AliasSampler`) to amortize the
    O(K) preprocessing across draws; otherwise the sampler is built from
    `weights` on the fly.
    """
    if prepared is None:
        if weights is None:
            raise InvalidParameterError("either weights or a prepared sampler is required")
        prepared = AliasSampler(weights)
    return prepared.draw(stream)
