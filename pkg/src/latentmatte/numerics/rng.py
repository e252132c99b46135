"""Seeded randomness with stable child-stream derivation."""

import numpy as np


def _splitmix64(x: int) -> int:
    """One round of splitmix64; used to derive child seeds deterministically."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


class SeededRng:
    """Deterministic random source: same seed, same sample sequence.

    Wraps a PCG64 generator and counts draws so the stream position is
    inspectable. Instances are not shared between workers; derive one per
    task with `child`.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.position = 0
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def child(self, tag: int | str) -> "SeededRng":
        """Independent stream derived from (seed, tag); stable across runs."""
        if isinstance(tag, str):
            h = 0xCBF29CE484222325
            for b in tag.encode("utf-8"):
                h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
            tag_int = h
        else:
            tag_int = int(tag)
        return SeededRng(_splitmix64(self.seed ^ _splitmix64(tag_int)))

    def normal(self, shape) -> np.ndarray:
        self.position += int(np.prod(shape, dtype=np.int64))
        return self._gen.standard_normal(size=shape, dtype=np.float32)

    def uniform(self, shape) -> np.ndarray:
        self.position += int(np.prod(shape, dtype=np.int64))
        return self._gen.random(size=shape, dtype=np.float32)

    def integers(self, low: int, high: int, shape=()) -> np.ndarray:
        self.position += int(np.prod(shape, dtype=np.int64)) if shape else 1
        return self._gen.integers(low, high, size=shape)

    def choice_without_replacement(self, n: int, k: int) -> np.ndarray:
        """First k elements of a seeded permutation of range(n), sorted."""
        self.position += n
        picked = self._gen.permutation(n)[:k]
        return np.sort(picked)
