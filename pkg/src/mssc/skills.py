"""Fixed-width skill bitmasks.

A skill set is stored as a plain Python ``int`` whose bit ``k`` is set when
skill ``k`` belongs to the set.  :class:`SkillSet` wraps that integer with the
set vocabulary; the solvers work on the raw integers directly because the
bit operations are what they need in inner loops.

For the vectorised pair retrieval the masks are also packed into ``uint64``
word arrays of shape ``(N, words)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True, order=True)
class SkillSet:
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("skill bitmask must be non-negative")

    @classmethod
    def of(cls, skills: Iterable[int]) -> "SkillSet":
        bits = 0
        for k in skills:
            if k < 0:
                raise ValueError(f"negative skill index {k}")
            bits |= 1 << k
        return cls(bits)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, skill: int) -> bool:
        return skill >= 0 and (self.bits >> skill) & 1 == 1

    def __and__(self, other: "SkillSet") -> "SkillSet":
        return SkillSet(self.bits & other.bits)

    def __or__(self, other: "SkillSet") -> "SkillSet":
        return SkillSet(self.bits | other.bits)

    def __sub__(self, other: "SkillSet") -> "SkillSet":
        return SkillSet(self.bits & ~other.bits)

    def issubset(self, other: "SkillSet") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "SkillSet") -> bool:
        return self.bits & other.bits == 0

    def width(self) -> int:
        """Smallest universe size K that can hold this set."""
        return self.bits.bit_length()

    def __repr__(self) -> str:
        return f"SkillSet({sorted(self)})"


def n_words(universe: int) -> int:
    return max(1, (universe + 63) // 64)


def pack(masks: Iterable[int], words: int) -> np.ndarray:
    """Pack integer masks into a ``(N, words)`` uint64 array."""
    masks = list(masks)
    lim = (1 << 64) - 1
    if words == 1 and all(m <= lim for m in masks):
        return np.array(masks, dtype=np.uint64).reshape(-1, 1)
    out = np.zeros((len(masks), words), dtype=np.uint64)
    for i, m in enumerate(masks):
        for w in range(words):
            out[i, w] = (m >> (64 * w)) & lim
    return out


def intersects(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise ``a & b != 0`` for broadcastable word arrays."""
    return np.any((a & b) != 0, axis=-1)


def popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1)
