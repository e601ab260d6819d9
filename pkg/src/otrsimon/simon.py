"""Exact classical simulation of Simon's period-finding subroutine.

One call to :func:`simon_sample` stands for one superposition query followed
by the final measurement.  Rather than evolve a 2^(2n)-amplitude state, the
sampler uses the deferred-measurement view: measuring the output register
first picks ``v = f(x0)`` for a uniform ``x0`` and leaves the input register
uniform over the preimage ``S = f^-1(v)``.  After the closing Hadamard layer
the amplitude of ``y`` is proportional to ``sum_{x in S} (-1)^(x.y)``, the
Walsh-Hadamard transform of the indicator of ``S``.  Squared amplitudes are
integers, so the measurement is drawn by exact integer inverse-CDF sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gf2n import MAX_WIDTH

SHI_CONSTANT = 0.6454
VERIFY_CHECKS = 16


@dataclass(frozen=True, eq=False)
class BooleanFunctionTable:
    """Truth table of f: {0,1}^n -> {0,1}^n."""

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (1 << self.n,):
            raise ValueError(f"table must have exactly 2^{self.n} entries")
        if t.size and (t.min() < 0 or t.max() >> self.n):
            raise ValueError(f"table entries must be {self.n}-bit values")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_function(cls, n: int, fn) -> BooleanFunctionTable:
        """Tabulate ``fn`` by calling it once on the array of all inputs."""
        xs = np.arange(1 << n, dtype=np.int64)
        return cls(n, np.broadcast_to(np.asarray(fn(xs), dtype=np.int64), xs.shape).copy())

    def __call__(self, x):
        return self.table[x]

    def __len__(self):
        return self.table.shape[0]


def planted_period_table(n: int, s: int, rng: np.random.Generator) -> BooleanFunctionTable:
    """A random exactly-2-to-1 function whose only nonzero period is ``s``."""
    if not 0 < s < 1 << n:
        raise ValueError("planted period must be a nonzero n-bit value")
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    low = s.bit_length() - 1
    reps = xs[((xs >> low) & 1) == 0]          # one representative per coset {x, x^s}
    values = rng.permutation(size)[: size // 2]
    table = np.empty(size, dtype=np.int64)
    table[reps] = values
    table[reps ^ s] = values
    return BooleanFunctionTable(n, table)


def walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along the last axis."""
    a = np.array(v, dtype=np.int64, copy=True)
    size = a.shape[-1]
    h = 1
    while h < size:
        a = a.reshape(*a.shape[:-1], -1, 2, h)
        x, y = a[..., 0, :].copy(), a[..., 1, :]
        a[..., 0, :] += y
        a[..., 1, :] = x - y
        a = a.reshape(*a.shape[:-3], size)
        h *= 2
    return a


def dot(a: int, b: int) -> int:
    return (a & b).bit_count() & 1


class SimonSampler:
    """Measurement distribution of the Simon circuit for one function.

    Preimage classes are indexed once; the squared-amplitude CDF of each
    class is computed on first use and memoised.
    """

    def __init__(self, f: BooleanFunctionTable, cache_size: int = 512):
        self.f = f
        self.size = len(f)
        values, inverse = np.unique(f.table, return_inverse=True)
        self._class_of = inverse.reshape(-1)
        order = np.argsort(self._class_of, kind="stable")
        counts = np.bincount(self._class_of, minlength=values.size)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        self._members = order
        self._starts = starts
        self._counts = counts
        self._cdf = lru_cache(maxsize=cache_size)(self._class_cdf)

    def preimage(self, cls: int) -> np.ndarray:
        st = self._starts[cls]
        return self._members[st: st + self._counts[cls]]

    def _class_cdf(self, cls: int) -> np.ndarray:
        ind = np.zeros(self.size, dtype=np.int64)
        ind[self.preimage(cls)] = 1
        amp = walsh_hadamard(ind)
        return np.cumsum(amp * amp)

    def distribution(self, x0: int) -> np.ndarray:
        """Pr[y] after the output register collapses to f(x0)."""
        cdf = self._cdf(int(self._class_of[x0]))
        return np.diff(cdf, prepend=0) / cdf[-1]

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if size is None:
            x0 = int(rng.integers(self.size))
            cdf = self._cdf(int(self._class_of[x0]))
            u = int(rng.integers(cdf[-1]))
            return int(np.searchsorted(cdf, u, side="right"))
        x0 = rng.integers(self.size, size=size)
        cls = self._class_of[x0]
        out = np.empty(size, dtype=np.int64)
        for c in np.unique(cls):
            idx = np.nonzero(cls == c)[0]
            cdf = self._cdf(int(c))
            u = rng.integers(cdf[-1], size=idx.size)
            out[idx] = np.searchsorted(cdf, u, side="right")
        return out


def simon_sample(f: BooleanFunctionTable, rng: np.random.Generator) -> int:
    return SimonSampler(f).sample(rng)


class Gf2Basis:
    """Row-echelon basis of a subspace of GF(2)^n, rows keyed by leading bit."""

    def __init__(self, n: int):
        self.n = n
        self._rows: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> list[int]:
        return [self._rows[p] for p in sorted(self._rows, reverse=True)]

    def reduce(self, y: int) -> int:
        while y:
            p = y.bit_length() - 1
            r = self._rows.get(p)
            if r is None:
                break
            y ^= r
        return y

    def add(self, y: int) -> bool:
        """Insert ``y`` if it is independent of the current rows."""
        if not 0 <= y < 1 << self.n:
            raise ValueError(f"{y!r} is not an {self.n}-bit vector")
        y = self.reduce(y)
        if y:
            self._rows[y.bit_length() - 1] = y
            return True
        return False


def gf2_add_row(basis: Gf2Basis, y: int) -> Gf2Basis:
    basis.add(y)
    return basis


def nullspace_1d(basis: Gf2Basis) -> int:
    """The unique nonzero s orthogonal to every row, for rank n-1."""
    n = basis.n
    if basis.rank != n - 1:
        raise RuntimeError(f"need rank {n - 1}, basis has rank {basis.rank}")
    pivots = sorted(basis._rows)
    free = next(b for b in range(n) if b not in basis._rows)
    # back-substitute to reduced echelon form: each row is its pivot plus maybe the free bit
    reduced: dict[int, int] = {}
    for p in pivots:
        r = basis._rows[p]
        for q, rq in reduced.items():
            if r >> q & 1:
                r ^= rq
        reduced[p] = r
    s = 1 << free
    for p, r in reduced.items():
        if r >> free & 1:
            s |= 1 << p
    return s


@dataclass
class PeriodResult:
    s: int | None
    queries: int
    verified: bool
    rank: int = 0


def recover_period(f: BooleanFunctionTable, rng: np.random.Generator,
                   max_queries: int | None = None, checks: int = VERIFY_CHECKS,
                   sampler: SimonSampler | None = None) -> PeriodResult:
    """Sample until rank n-1 or the budget runs out, solve, then spot-check.

    ``queries`` counts Simon samples only; building the truth table and the
    ``checks`` classical evaluations of f are not counted.
    """
    n = f.n
    if max_queries is None:
        max_queries = 4 * n
    if max_queries < n:
        raise ValueError(f"max_queries must be at least n = {n}")
    sampler = sampler or SimonSampler(f)
    basis = Gf2Basis(n)
    queries = 0
    while basis.rank < n - 1 and queries < max_queries:
        basis.add(sampler.sample(rng))
        queries += 1
    if basis.rank != n - 1:
        return PeriodResult(None, queries, False, basis.rank)
    s = nullspace_1d(basis)
    xs = rng.integers(1 << n, size=checks)
    if not np.array_equal(f.table[xs], f.table[xs ^ s]):
        return PeriodResult(None, queries, False, basis.rank)
    return PeriodResult(s, queries, True, basis.rank)


def brute_force_periods(f: BooleanFunctionTable) -> set[int]:
    """Every nonzero s with f(x ^ s) = f(x) for all x, by exhaustive scan."""
    if f.n > MAX_WIDTH:
        raise ValueError(f"exhaustive scan limited to n <= {MAX_WIDTH}")
    t = f.table
    xs = np.arange(len(f), dtype=np.int64)
    # any period s must satisfy f(s) = f(0)
    candidates = np.nonzero(t == t[0])[0]
    return {int(s) for s in candidates if s and np.array_equal(t[xs ^ s], t)}


def prob_lower_bound(n: int, c: float) -> float:
    """1 - 2^n * 0.6454^(c*n), clamped to [0, 1]."""
    log2_fail = n + c * n * math.log2(SHI_CONSTANT)
    if log2_fail >= 0:
        return 0.0
    return min(1.0, max(0.0, 1.0 - 2.0 ** log2_fail))
