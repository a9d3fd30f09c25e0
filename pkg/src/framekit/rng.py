"""Counter-based random numbers for reproducible parallel Monte Carlo.

Every draw is a pure function of ``(seed, stream, trial, counter)``:

    key  = mix64(mix64(seed ^ STREAM_SALT[stream]) + (trial + 1) * GOLDEN)
    word = mix64(key + (counter + 1) * GOLDEN)

where ``mix64`` is the SplitMix64 finaliser and ``GOLDEN = 0x9E3779B97F4A7C15``.
Trial ``i`` therefore owns an independent sub-stream no matter how trials
are split across workers or vectorised, which is what makes results
bit-identical between 1 and N workers. The scheme is part of the output
contract: changing it changes every Monte Carlo number.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

# Fixed salts keep the streams used by different parts of a simulation apart.
STREAMS = {
    "input": 0x1F3A5C7E9B2D4F61,
    "buffer": 0x2B4D6F81A3C5E7F9,
    "step": 0x3C5E7092B4D6F8A1,
    "element": 0x4D6F81A3C5E7F9B2,
    "noise": 0x5E7092B4D6F8A1C3,
    "circuit": 0x6F81A3C5E7F9B2D4,
    "error": 0x7092B4D6F8A1C3E5,
}


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self._keys = {
            name: mix64(np.uint64((self.seed ^ salt) & _MASK)) for name, salt in STREAMS.items()
        }

    def keys(self, stream: str, trial) -> np.ndarray:
        """Per-trial stream keys; reuse them to draw many counters cheaply."""
        trial = np.asarray(trial, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return mix64(self._keys[stream] + (trial + np.uint64(1)) * GOLDEN)

    @staticmethod
    def words_from_keys(keys, counter) -> np.ndarray:
        counter = np.asarray(counter, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return mix64(np.asarray(keys, dtype=np.uint64) + (counter + np.uint64(1)) * GOLDEN)

    def words(self, stream: str, trial, counter) -> np.ndarray:
        """Raw 64-bit words, broadcasting ``trial`` against ``counter``."""
        return self.words_from_keys(self.keys(stream, trial), counter)

    def uniform(self, stream: str, trial, counter) -> np.ndarray:
        """Doubles in [0, 1) with 53 random bits."""
        return to_uniform(self.words(stream, trial, counter))

    def integers(self, stream: str, trial, counter, m: int) -> np.ndarray:
        """Integers in [0, m); bias is below m / 2**53."""
        u = self.uniform(stream, trial, counter)
        return np.minimum((u * m).astype(np.int64), m - 1)


def bernoulli_threshold(p: float) -> np.uint64:
    """``(word >> 11) < threshold`` happens with probability ``p`` (to 2**-53)."""
    return np.uint64(min(int(round(p * (1 << 53))), 1 << 53))


def to_uniform(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
