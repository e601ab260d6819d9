"""Toy block-cipher primitives at desk-scale widths.

Every table is derived from a SplitMix64 stream so that a given seed produces
the same permutation on every platform and numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2n import MAX_WIDTH, MIN_WIDTH

_M64 = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea and Flood's SplitMix64: a counter plus a 64-bit finalizer."""

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & _M64

    def next(self) -> int:
        self.state = (self.state + self.GAMMA) & _M64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on the top bits."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        bits = max(1, (bound - 1).bit_length())
        while True:
            r = self.next() >> (64 - bits)
            if r < bound:
                return r


def derive_seed(master: int, index: int) -> int:
    """Seed number ``index`` of the SplitMix64 stream started at ``master``.

    Position ``index`` is reached in O(1), so any trial can be replayed alone.
    """
    return SplitMix64((master + index * SplitMix64.GAMMA) & _M64).next()


def _seed_int(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed) & _M64
    if isinstance(seed, str):
        seed = seed.encode()
    if isinstance(seed, (bytes, bytearray)):
        h = 0xCBF29CE484222325  # FNV-1a 64
        for b in seed:
            h = ((h ^ b) * 0x100000001B3) & _M64
        return h
    raise TypeError(f"unsupported seed type {type(seed).__name__}")


def _check_width(n: int) -> None:
    if not MIN_WIDTH <= n <= MAX_WIDTH:
        raise ValueError(f"width must be in [{MIN_WIDTH}, {MAX_WIDTH}], got {n}")


@dataclass(frozen=True, eq=False)
class Permutation:
    """A bijection on ``width``-bit values stored as forward and inverse tables.

    Both tables are read-only int64 arrays, so ``forward[x]`` works for a
    scalar or for a whole array of inputs at once.
    """

    width: int
    forward: np.ndarray
    inverse: np.ndarray = field(repr=False)

    @classmethod
    def from_table(cls, table) -> Permutation:
        fwd = np.asarray(table, dtype=np.int64)
        size = fwd.shape[0]
        width = size.bit_length() - 1
        if fwd.ndim != 1 or size != 1 << width:
            raise ValueError("table length must be a power of two")
        if not np.array_equal(np.sort(fwd), np.arange(size)):
            raise ValueError("table is not a bijection")
        inv = np.empty_like(fwd)
        inv[fwd] = np.arange(size)
        fwd.setflags(write=False)
        inv.setflags(write=False)
        return cls(width, fwd, inv)

    @classmethod
    def identity(cls, width: int) -> Permutation:
        return cls.from_table(np.arange(1 << width))

    def __call__(self, x):
        return self.forward[x]

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.forward, other.forward)

    __hash__ = None


def random_permutation(seed, n: int) -> Permutation:
    """Fisher-Yates shuffle of the identity table driven by SplitMix64."""
    _check_width(n)
    rng = SplitMix64(_seed_int(seed))
    table = list(range(1 << n))
    for i in range(len(table) - 1, 0, -1):
        j = rng.below(i + 1)
        table[i], table[j] = table[j], table[i]
    return Permutation.from_table(table)


def _check_input(P: Permutation, x) -> None:
    if isinstance(x, np.ndarray):
        if x.size and (x.min() < 0 or x.max() >> P.width):
            raise ValueError(f"input outside [0, 2^{P.width})")
    elif not 0 <= x < 1 << P.width:
        raise ValueError(f"{x!r} is not a {P.width}-bit value")


def perm_apply(P: Permutation, x):
    _check_input(P, x)
    y = P.forward[x]
    return y if isinstance(x, np.ndarray) else int(y)


def perm_invert(P: Permutation, y):
    _check_input(P, y)
    x = P.inverse[y]
    return x if isinstance(y, np.ndarray) else int(x)


class KeyedCipher:
    """An ideal cipher instance: the permutation selected by ``key``."""

    def __init__(self, key, n: int):
        self.key = key
        self.width = n
        self.perm = random_permutation(key, n)

    def __call__(self, x):
        return self.perm.forward[x]

    def encrypt(self, x):
        return perm_apply(self.perm, x)

    def decrypt(self, y):
        return perm_invert(self.perm, y)

    def __eq__(self, other):
        return isinstance(other, KeyedCipher) and self.perm == other.perm

    __hash__ = None

    def __repr__(self):
        return f"KeyedCipher(n={self.width})"


@dataclass(frozen=True)
class EvenMansourCipher:
    """x -> k2 ^ P(x ^ k1) over a public permutation ``P``."""

    k1: int
    k2: int
    P: Permutation = field(repr=False)

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if not 0 <= k < 1 << self.P.width:
                raise ValueError(f"key {k!r} is not a {self.P.width}-bit value")

    @property
    def width(self) -> int:
        return self.P.width

    def __call__(self, x):
        return self.k2 ^ self.P.forward[x ^ self.k1]


def em_encrypt(cipher: EvenMansourCipher, x):
    _check_input(cipher.P, x)
    y = cipher(x)
    return y if isinstance(x, np.ndarray) else int(y)


def em_decrypt(cipher: EvenMansourCipher, y):
    _check_input(cipher.P, y)
    x = cipher.P.inverse[y ^ cipher.k2] ^ cipher.k1
    return x if isinstance(y, np.ndarray) else int(x)
