import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from otrsimon.simon import (BooleanFunctionTable, Gf2Basis, SimonSampler, brute_force_periods, dot,
                            gf2_add_row, nullspace_1d, planted_period_table, prob_lower_bound,
                            recover_period, simon_sample, walsh_hadamard)


def amplitudes_by_enumeration(table, n, v):
    """sum_{x: f(x)=v} (-1)^(x.y) for every y, straight from the definition."""
    S = [x for x in range(1 << n) if table[x] == v]
    return [sum((-1) ** dot(x, y) for x in S) for y in range(1 << n)]


def hadamard_matrix(n):
    H = np.array([[1]])
    for _ in range(n):
        H = np.block([[H, H], [H, -H]])
    return H


def test_walsh_hadamard_matches_matrix(rng):
    for n in range(1, 7):
        v = rng.integers(-3, 4, size=1 << n)
        assert np.array_equal(walsh_hadamard(v), hadamard_matrix(n) @ v)


def test_n2_example_only_orthogonal_outcomes(rng):
    # 00,11 -> a ; 01,10 -> b ; period 11
    f = BooleanFunctionTable(2, [0, 1, 1, 0])
    # enumeration: amplitudes vanish on 01 and 10 for both output values
    for v in (0, 1):
        amps = amplitudes_by_enumeration(f.table, 2, v)
        assert amps[1] == amps[2] == 0
    samples = {simon_sample(f, rng) for _ in range(200)}
    assert samples <= {0b00, 0b11}
    assert samples == {0b00, 0b11}


def test_injective_function_uniform(rng):
    f = BooleanFunctionTable(4, rng.permutation(16))
    s = SimonSampler(f)
    for x0 in range(16):
        assert np.allclose(s.distribution(x0), 1 / 16)


def test_constant_function_gives_zero(rng):
    f = BooleanFunctionTable(6, np.full(64, 5))
    assert all(simon_sample(f, rng) == 0 for _ in range(50))
    assert set(SimonSampler(f).sample(rng, size=500).tolist()) == {0}


def test_sampler_distribution_matches_enumeration(rng):
    n = 4
    table = rng.integers(0, 5, size=16)        # arbitrary many-to-one function
    f = BooleanFunctionTable(n, table)
    s = SimonSampler(f)
    for x0 in range(16):
        amps = amplitudes_by_enumeration(table, n, table[x0])
        probs = np.array(amps, dtype=float) ** 2
        assert np.allclose(s.distribution(x0), probs / probs.sum())


def test_sampling_reproducible():
    f = planted_period_table(8, 0x33, np.random.default_rng(1))
    a = SimonSampler(f).sample(np.random.default_rng(9), size=100)
    b = SimonSampler(f).sample(np.random.default_rng(9), size=100)
    assert np.array_equal(a, b)
    r1, r2 = np.random.default_rng(4), np.random.default_rng(4)
    assert [simon_sample(f, r1) for _ in range(20)] == [simon_sample(f, r2) for _ in range(20)]


def test_orthogonality_10k_samples(rng):
    for s in (0x01, 0x80, 0xB7, 0xFF):
        f = planted_period_table(8, s, rng)
        ys = SimonSampler(f).sample(rng, size=10_000)
        parity = np.array([dot(int(y), s) for y in ys])
        assert parity.sum() == 0


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_uniform_over_hyperplane(n, rng):
    s = int(rng.integers(1, 1 << n))
    f = planted_period_table(n, s, rng)
    ys = SimonSampler(f).sample(rng, size=100_000)
    counts = np.bincount(ys, minlength=1 << n)
    hyper = [y for y in range(1 << n) if dot(y, s) == 0]
    assert counts.sum() == counts[hyper].sum()
    assert chisquare(counts[hyper]).pvalue > 0.001


def test_planted_table_shape(rng):
    f = planted_period_table(6, 0b101010, rng)
    assert brute_force_periods(f) == {0b101010}
    assert len(np.unique(f.table)) == 32


# ------------------------------------------------------------------ GF(2)


def test_add_row_examples():
    b = Gf2Basis(3)
    assert not b.add(0) and b.rank == 0
    assert b.add(0b101)
    assert not b.add(0b101) and b.rank == 1
    b2 = Gf2Basis(3)
    gf2_add_row(gf2_add_row(b2, 0b100), 0b010)
    gf2_add_row(b2, 0b110)
    assert b2.rank == 2
    with pytest.raises(ValueError):
        b2.add(8)


def brute_nullspace(rows, n):
    return [s for s in range(1, 1 << n) if all(dot(r, s) == 0 for r in rows)]


def test_nullspace_examples():
    b = Gf2Basis(3)
    for r in (0b110, 0b011):
        b.add(r)
    assert brute_nullspace([0b110, 0b011], 3) == [0b111]
    assert nullspace_1d(b) == 0b111

    b = Gf2Basis(2)
    b.add(0b10)
    assert brute_nullspace([0b10], 2) == [0b01]
    assert nullspace_1d(b) == 0b01

    n = 7
    b = Gf2Basis(n)
    for i in range(n - 1):
        b.add(1 << i)
    assert nullspace_1d(b) == 1 << (n - 1)


def test_nullspace_requires_rank_n_minus_1():
    b = Gf2Basis(4)
    b.add(1)
    with pytest.raises(RuntimeError):
        nullspace_1d(b)


def numpy_rank(vectors, n):
    """Dense Gaussian elimination on a 0/1 matrix, as an independent rank oracle."""
    if not vectors:
        return 0
    M = np.array([[(v >> i) & 1 for i in range(n)] for v in vectors], dtype=np.uint8)
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, len(M)) if M[r, col]), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(len(M)):
            if r != rank and M[r, col]:
                M[r] ^= M[rank]
        rank += 1
    return rank


@settings(max_examples=300, deadline=None)
@given(n=st.integers(1, 12), data=st.data())
def test_basis_rank_property(n, data):
    vecs = data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=2 * n))
    b = Gf2Basis(n)
    for v in vecs:
        b.add(v)
    assert b.rank == numpy_rank(vecs, n)
    rows = b.rows
    assert len({r.bit_length() for r in rows}) == len(rows)  # distinct pivots
    if b.rank == n - 1 and n > 1:
        assert brute_nullspace(vecs, n) == [nullspace_1d(b)]


# ------------------------------------------------------------ period finding


def test_recover_planted_period_n8(rng):
    for _ in range(50):
        s = int(rng.integers(1, 256))
        res = recover_period(planted_period_table(8, s, rng), rng)
        assert res.verified and res.s == s
        assert 7 <= res.queries <= 32


def test_recover_injective_fails(rng):
    f = BooleanFunctionTable(8, rng.permutation(256))
    for _ in range(20):
        res = recover_period(f, rng)
        assert not res.verified and res.s is None
        assert res.queries <= 32


def test_recover_constant_exhausts_budget(rng):
    res = recover_period(BooleanFunctionTable(6, np.zeros(64)), rng, max_queries=10)
    assert (res.verified, res.queries, res.rank) == (False, 10, 0)


def test_budget_precondition(rng):
    with pytest.raises(ValueError):
        recover_period(planted_period_table(8, 3, rng), rng, max_queries=7)


def test_mean_queries_n8(rng):
    q = [recover_period(planted_period_table(8, int(rng.integers(1, 256)), rng), rng).queries
         for _ in range(1000)]
    assert np.mean(q) <= 24


def test_brute_force_periods():
    assert brute_force_periods(BooleanFunctionTable(3, list(range(8)))) == set()
    f = BooleanFunctionTable(3, [0, 0, 1, 1, 2, 2, 3, 3])
    assert brute_force_periods(f) == {1}
    # two-dimensional period space
    g = BooleanFunctionTable(3, [x >> 2 for x in range(8)])
    assert brute_force_periods(g) == {1, 2, 3}
    # cross-check against a literal double loop
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = rng.integers(0, 3, size=16)
        want = {s for s in range(1, 16) if all(t[x ^ s] == t[x] for x in range(16))}
        assert brute_force_periods(BooleanFunctionTable(4, t)) == want


def test_recover_agrees_with_brute_force(rng):
    for _ in range(50):
        t = rng.integers(0, 256, size=256)
        s = int(rng.integers(1, 256))
        t[np.arange(256) ^ s] = t  # make s a period (collapses pairs)
        f = BooleanFunctionTable(8, t)
        periods = brute_force_periods(f)
        res = recover_period(f, rng)
        if len(periods) == 1 and res.verified:
            assert {res.s} == periods


def test_bad_tables():
    with pytest.raises(ValueError):
        BooleanFunctionTable(3, [0] * 7)
    with pytest.raises(ValueError):
        BooleanFunctionTable(3, [8] * 8)


# ------------------------------------------------------------ bound


def test_prob_lower_bound_values():
    assert prob_lower_bound(8, 4) == pytest.approx(1 - 256 * 0.6454 ** 32, rel=1e-12)
    assert 1 - 256 * 0.6454 ** 32 == pytest.approx(0.99979, abs=1e-5)
    assert prob_lower_bound(128, 4) >= 1 - 2.0 ** -128
    # exact form of that claim: log2 of the failure term is at most -n
    assert 128 + 4 * 128 * math.log2(0.6454) <= -128
    assert prob_lower_bound(8, 1) == 0.0


@pytest.mark.parametrize("n", [4, 8, 16, 64, 128])
def test_prob_lower_bound_monotone(n):
    cs = np.linspace(0.5, 8, 200)
    vals = [prob_lower_bound(n, c) for c in cs]
    assert all(a <= b for a, b in itertools.pairwise(vals))
    assert all(0.0 <= v <= 1.0 for v in vals)
