import numpy as np
import pytest

from otrsimon.cipher import EvenMansourCipher, KeyedCipher, random_permutation
from otrsimon.gf2n import FieldSpec
from otrsimon.mode import InstanceError, otr_new, prost_new

ACCEPTANCE_LINES: list[str] = []


def make_otr(n=8, key=0, rng=None):
    """An OTR instance; walks nonces until delta and L are both nonzero."""
    spec = FieldSpec(n)
    E = KeyedCipher(key, n)
    start = 0 if rng is None else int(rng.integers(1 << n))
    for i in range(1 << n):
        try:
            return otr_new(E, spec, (start + i) % (1 << n))
        except InstanceError:
            continue
    raise RuntimeError("no usable nonce")


def make_prost(n=8, rng=None, k1=None, k2=None, perm_seed=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    spec = FieldSpec(n)
    P = random_permutation(int(rng.integers(1 << 62)) if perm_seed is None else perm_seed, n)
    k1 = int(rng.integers(1 << n)) if k1 is None else k1
    k2 = int(rng.integers(1 << n)) if k2 is None else k2
    em = EvenMansourCipher(k1, k2, P)
    for _ in range(1 << n):
        try:
            return prost_new(em, spec, int(rng.integers(1 << n))), P
        except InstanceError:
            continue
    raise RuntimeError("no usable nonce")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def otr8():
    return make_otr(8, key=7)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
