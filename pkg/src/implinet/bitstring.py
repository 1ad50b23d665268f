"""Fixed-width bit strings ordered by bitwise implication.

Bits are indexed 1..n from the left, so index 1 is the most significant bit
of the packed integer. Random mutations visit indices in ascending order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

MAX_WIDTH = 64
MAX_REJECTION_ROUNDS = 10_000


class RandomSource:
    """Seeded random stream used by every stochastic step of the model.

    Backed by CPython's Mersenne Twister (``random.Random``). A uniform bit is
    ``getrandbits(1)``; a uniform integer in ``[0, k)`` is ``randrange(k)``.
    Both are stable across CPython 3.x releases, so a seed pins a run.
    """

    __slots__ = ("seed", "_rng")

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._rng = random.Random(seed)

    def bit(self) -> int:
        return self._rng.getrandbits(1)

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError(f"upper bound must be positive, got {k}")
        return self._rng.randrange(k)


@dataclass(frozen=True, order=False)
class BitString:
    """An n-bit word. ``value`` packs bit index 1 into the highest position."""

    width: int
    value: int

    def __post_init__(self):
        if not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")

    @classmethod
    def parse(cls, text: str) -> BitString:
        if not text or any(ch not in "01" for ch in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def from_bits(cls, bits) -> BitString:
        bits = list(bits)
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | b
        return cls(len(bits), value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.width - i)) & 1 for i in range(1, self.width + 1))

    def __getitem__(self, index: int) -> int:
        """Bit at 1-based ``index`` (leftmost is 1)."""
        if not 1 <= index <= self.width:
            raise IndexError(index)
        return (self.value >> (self.width - index)) & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b")

    def __repr__(self) -> str:
        return f"BitString('{self}')"


def implies_int(a: int, c: int) -> bool:
    return a & ~c == 0


def implies(a: BitString, c: BitString) -> bool:
    """True iff every bit of ``a`` is <= the corresponding bit of ``c``."""
    if a.width != c.width:
        raise ValueError(f"width mismatch: {a.width} vs {c.width}")
    return implies_int(a.value, c.value)


def collapse_int(value: int, width: int, r: RandomSource) -> int:
    out = value
    for shift in range(width - 1, -1, -1):
        mask = 1 << shift
        if value & mask and not r.bit():
            out &= ~mask
    return out


def expand_int(value: int, width: int, r: RandomSource) -> int:
    out = value
    for shift in range(width - 1, -1, -1):
        mask = 1 << shift
        if not value & mask and r.bit():
            out |= mask
    return out


def collapse(a: BitString, r: RandomSource) -> BitString:
    """Keep each 0-bit; resample each 1-bit as a fair coin (draws in index order)."""
    return BitString(a.width, collapse_int(a.value, a.width, r))


def expand(a: BitString, r: RandomSource) -> BitString:
    """Keep each 1-bit; resample each 0-bit as a fair coin (draws in index order)."""
    return BitString(a.width, expand_int(a.value, a.width, r))


def deduce_pair_int(value: int, width: int, r: RandomSource) -> tuple[int, int, int]:
    """Return ``(left, right, rounds)``; ``rounds`` counts rejected draws."""
    for rounds in range(MAX_REJECTION_ROUNDS):
        left = collapse_int(value, width, r)
        right = expand_int(value, width, r)
        if left != right:
            return left, right, rounds
    raise RuntimeError(f"deduce_pair exceeded {MAX_REJECTION_ROUNDS} rounds")


def deduce_pair(p: BitString, r: RandomSource) -> tuple[BitString, BitString]:
    """Collapse and expand ``p`` as fresh pairs until the two sides differ.

    Since ``left <= p <= right`` bitwise, the loop only rejects the draw in
    which nothing changed. The result always satisfies ``implies(left, right)``.
    """
    left, right, _ = deduce_pair_int(p.value, p.width, r)
    return BitString(p.width, left), BitString(p.width, right)
