"""Quantum forgery attacks on OTR and Prost-OTR-Even-Mansour, simulated.

Nothing in this module reads an instance's secrets.  The attacker sees

* a :class:`CiphertextTagOracle` answering tag queries (a query whose blocks
  contain numpy arrays is a superposition query: it returns the whole truth
  table, which is then handed to the Simon sampler),
* the receiver's verification verdict on a submitted forgery, and
* public parameters: block width, field polynomial, nonce, and the public
  permutation P of the Even-Mansour cipher.

Ground-truth comparisons live in :mod:`otrsimon.adjudicate` and the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cipher import EvenMansourCipher, Permutation
from .gf2n import FieldElement
from .mode import TaggedCiphertext, as_blocks, prost_encrypt, prost_new, tag_coefficient
from .simon import BooleanFunctionTable, recover_period

RETRIES = 3


class RecoveryError(RuntimeError):
    """A period could not be found within the query budget and retries."""


class CiphertextTagOracle:
    """Tag oracle over an OTR or Prost instance.

    ``mode="ciphertext"`` returns the tag that authenticates the supplied
    ciphertext blocks (decrypt-then-tag); ``mode="plaintext"`` returns the tag
    the sender would attach to the supplied message.
    """

    CIPHERTEXT = "ciphertext"
    PLAINTEXT = "plaintext"

    def __init__(self, instance, mode: str = CIPHERTEXT):
        if mode not in (self.CIPHERTEXT, self.PLAINTEXT):
            raise ValueError(f"unknown oracle mode {mode!r}")
        self._inst = instance
        self.mode = mode
        self.spec = instance.spec
        self.nonce = instance.nonce
        self.classical_queries = 0
        self.superposition_tables = 0
        self.transcript: list[tuple[tuple, int]] = []

    @property
    def width(self) -> int:
        return self.spec.width

    def tag(self, blocks):
        blocks = list(blocks)
        if len(blocks) < 2:
            raise ValueError("need at least 2 blocks")
        superposed = any(isinstance(b, np.ndarray) for b in blocks)
        if not superposed:
            blocks = list(as_blocks(blocks, self.spec))
        if self.mode == self.CIPHERTEXT:
            blocks = self._inst._decrypt(blocks)
        t = self._inst._tag(blocks)
        if superposed:
            self.superposition_tables += 1
            return np.broadcast_to(t, np.broadcast_shapes(*(np.shape(b) for b in blocks))).astype(np.int64)
        self.classical_queries += 1
        t = int(t)
        self.transcript.append((tuple(blocks) if self.mode == self.PLAINTEXT else None, t))
        return t

    def verify(self, ct: TaggedCiphertext) -> bool:
        """The receiver's accept/reject verdict."""
        C = as_blocks(ct.C, self.spec)
        M = self._inst._decrypt(list(C))
        return int(self._inst._tag(M)) == ct.T


@dataclass
class ForgeryOutcome:
    original: TaggedCiphertext
    forged: tuple | None
    period: int | None
    queries: int
    verified: bool
    distinct: bool
    attempts: int = 1

    @property
    def success(self) -> bool:
        return self.verified and self.distinct


@dataclass
class ProstKeyRecovery:
    L: FieldElement | None
    k1: int | None
    k2: int | None
    queries: int
    exact: bool | None = None      # filled in by whoever knows the real secrets
    consistent: bool = False       # recovered keys replay every observed answer
    period_c: int | None = None    # period found for f_c
    c: int | None = None           # the constant M[4] used for f_c
    period_k1: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.L is not None and self.k1 is not None and self.k2 is not None


def _xs(oracle) -> np.ndarray:
    return np.arange(1 << oracle.width, dtype=np.int64)


def _require_ciphertext_oracle(oracle):
    if oracle.mode != CiphertextTagOracle.CIPHERTEXT:
        raise ValueError("this attack needs a ciphertext-input oracle")


# ------------------------------------------------------------ attack 1: OTR


def build_fb_table(ct: TaggedCiphertext, oracle: CiphertextTagOracle) -> BooleanFunctionTable:
    """x -> tag(C1, x, C3, x ^ tau, C5), tau = C2 ^ C4."""
    if ct.d != 5:
        raise ValueError(f"f_b template needs d = 5, got {ct.d}")
    _require_ciphertext_oracle(oracle)
    c1, c2, c3, c4, c5 = ct.C
    x = _xs(oracle)
    return BooleanFunctionTable(oracle.width, oracle.tag([c1, x, c3, x ^ (c2 ^ c4), c5]))


def build_fa_table(ct: TaggedCiphertext, oracle: CiphertextTagOracle) -> BooleanFunctionTable:
    """x -> tag(x, C2, x ^ theta, C4, C5), theta = C1 ^ C3."""
    if ct.d != 5:
        raise ValueError(f"f_a template needs d = 5, got {ct.d}")
    _require_ciphertext_oracle(oracle)
    c1, c2, c3, c4, c5 = ct.C
    x = _xs(oracle)
    return BooleanFunctionTable(oracle.width, oracle.tag([x, c2, x ^ (c1 ^ c3), c4, c5]))


def build_fd4_table(ct: TaggedCiphertext, oracle: CiphertextTagOracle) -> BooleanFunctionTable:
    """x -> tag(C1, x, x ^ gamma, C4), gamma = C2 ^ C3."""
    if ct.d != 4:
        raise ValueError(f"d = 4 template needs d = 4, got {ct.d}")
    _require_ciphertext_oracle(oracle)
    c1, c2, c3, c4 = ct.C
    x = _xs(oracle)
    return BooleanFunctionTable(oracle.width, oracle.tag([c1, x, x ^ (c2 ^ c3), c4]))


def _forge(ct, oracle, rng, table, positions, max_queries, retries, verifier):
    verifier = verifier or oracle.verify
    queries = 0
    attempts = 0
    res = None
    for attempts in range(1, retries + 2):
        res = recover_period(table, rng, max_queries)
        queries += res.queries
        if res.verified:
            break
    if res is None or not res.verified:
        return ForgeryOutcome(ct, None, None, queries, False, False, attempts)
    s = res.s
    forged = list(ct.C)
    for p in positions:
        forged[p] ^= s
    forged = tuple(forged)
    distinct = forged != ct.C
    verified = bool(verifier(TaggedCiphertext(forged, ct.T)))
    return ForgeryOutcome(ct, forged, s, queries, verified, distinct, attempts)


def forge_otr(ct: TaggedCiphertext, oracle: CiphertextTagOracle, rng: np.random.Generator,
              max_queries: int | None = None, retries: int = RETRIES, verifier=None) -> ForgeryOutcome:
    """Existential forgery for an intercepted d = 5 pair.

    With period s of f_b, the blocks (C1, C2^s, C3, C4^s, C5) are exactly the
    template evaluated at x = C2^s, so they carry the intercepted tag T.
    """
    return _forge(ct, oracle, rng, build_fb_table(ct, oracle), (1, 3), max_queries, retries, verifier)


def forge_otr_d4(ct: TaggedCiphertext, oracle: CiphertextTagOracle, rng: np.random.Generator,
                 max_queries: int | None = None, retries: int = RETRIES, verifier=None) -> ForgeryOutcome:
    """Same idea for d = 4, where the mirrored last chunk makes C2 and C3 the pair."""
    return _forge(ct, oracle, rng, build_fd4_table(ct, oracle), (1, 2), max_queries, retries, verifier)


# ------------------------------------------------------- attack 2: Prost-OTR


def build_fc_table(oracle: CiphertextTagOracle, c: int, fillers=(0, 0)) -> BooleanFunctionTable:
    """x -> tag(f1 || x) ^ tag(f1 || x || f3 || c).

    Equals P(x ^ 16L ^ k1) ^ P(x ^ c ^ 26L ^ k1); period c ^ 10L.
    """
    if oracle.mode != CiphertextTagOracle.PLAINTEXT:
        raise ValueError("f_c needs a plaintext-input oracle")
    f1, f3 = fillers
    x = _xs(oracle)
    t2 = oracle.tag([f1, x])
    t4 = oracle.tag([f1, x, f3, c])
    return BooleanFunctionTable(oracle.width, t2 ^ t4)


def find_L_period(oracle, rng, c: int | None = None, max_queries: int | None = None,
                  retries: int = RETRIES) -> tuple[int, int, int]:
    """Run Simon on f_c, resampling c and the fillers on failure.

    Returns (s, c, queries).  A given ``c`` is only used for the first attempt.
    """
    spec = oracle.spec
    queries = 0
    for attempt in range(retries + 1):
        if c is None or attempt:
            c = int(rng.integers(1 << spec.width))
        fillers = (0, 0) if attempt == 0 else tuple(int(v) for v in rng.integers(1 << spec.width, size=2))
        res = recover_period(build_fc_table(oracle, c, fillers), rng, max_queries)
        queries += res.queries
        if res.verified:
            return res.s, c, queries
    raise RecoveryError(f"no period for f_c after {retries + 1} attempts ({queries} queries)")


def L_from_period(s: int, c: int, spec) -> FieldElement:
    """Solve 10 * L = s ^ c."""
    return spec.element(spec.mul(spec.inv(spec.const(10)), s ^ c))


def recover_L(oracle, rng, c: int | None = None, max_queries: int | None = None,
              retries: int = RETRIES) -> FieldElement:
    s, c, _ = find_L_period(oracle, rng, c, max_queries, retries)
    return L_from_period(s, c, oracle.spec)


def _d2_offset(spec, L: FieldElement) -> int:
    return spec.mul(tag_coefficient(spec, 2), L.value)


def build_fd_table(oracle, L: FieldElement, P: Permutation, filler: int = 0) -> BooleanFunctionTable:
    """x -> tag(f1 || x ^ 16L) ^ P(x) = k2 ^ P(x ^ k1) ^ P(x); period k1."""
    if oracle.mode != CiphertextTagOracle.PLAINTEXT:
        raise ValueError("f_d needs a plaintext-input oracle")
    x = _xs(oracle)
    t = oracle.tag([filler, x ^ _d2_offset(oracle.spec, L)])
    return BooleanFunctionTable(oracle.width, t ^ P.forward[x])


def recover_k1(oracle, L: FieldElement, P: Permutation, rng, max_queries: int | None = None,
               retries: int = RETRIES) -> tuple[int, int]:
    """Period of f_d, or 0 when f_d is classically constant.  Returns (k1, queries)."""
    queries = 0
    for attempt in range(retries + 1):
        filler = 0 if attempt == 0 else int(rng.integers(1 << oracle.width))
        table = build_fd_table(oracle, L, P, filler)
        res = recover_period(table, rng, max_queries)
        queries += res.queries
        if res.verified:
            return res.s, queries
        # k1 = 0 makes f_d constant (= k2): every sample is 0 and no period is solved for
        if res.rank == 0 and _looks_constant(oracle, L, P, filler, rng):
            return 0, queries
    raise RecoveryError(f"no period for f_d after {retries + 1} attempts ({queries} queries)")


def _fd_classical(oracle, L, P, filler, x: int) -> int:
    return oracle.tag([filler, x ^ _d2_offset(oracle.spec, L)]) ^ int(P.forward[x])


def _looks_constant(oracle, L, P, filler, rng, checks: int = 16) -> bool:
    xs = rng.integers(1 << oracle.width, size=checks)
    vals = {_fd_classical(oracle, L, P, filler, int(x)) for x in xs}
    return len(vals) == 1


def recover_k2(oracle, L: FieldElement, P: Permutation, k1: int, x: int = 0, filler: int = 0) -> int:
    """k2 = P(x ^ k1) ^ tag(f1 || x ^ 16L), one classical query."""
    return int(P.forward[x ^ k1]) ^ oracle.tag([filler, x ^ _d2_offset(oracle.spec, L)])


def _replay(rec: ProstKeyRecovery, oracle, P: Permutation) -> bool:
    """Recompute every classical answer in the transcript from the recovered keys."""
    inst = prost_new(EvenMansourCipher(rec.k1, rec.k2, P), oracle.spec, oracle.nonce)
    for M, t in oracle.transcript:
        if M is not None and int(inst._tag(list(M))) != t:
            return False
    return True


def attack_prost(oracle: CiphertextTagOracle, P: Permutation, rng: np.random.Generator,
                 max_queries: int | None = None, retries: int = RETRIES,
                 replay_checks: int = 8) -> ProstKeyRecovery:
    """Recover (L, k1, k2) with two Simon runs and one classical query."""
    spec = oracle.spec
    queries = 0
    try:
        s, c, q = find_L_period(oracle, rng, None, max_queries, retries)
        queries += q
        L = L_from_period(s, c, spec)
        k1, q = recover_k1(oracle, L, P, rng, max_queries, retries)
        queries += q
    except RecoveryError as exc:
        return ProstKeyRecovery(None, None, None, queries, notes=[str(exc)])
    k2 = recover_k2(oracle, L, P, k1)
    rec = ProstKeyRecovery(L, k1, k2, queries, period_c=s, c=c, period_k1=k1)
    # a few fresh classical queries on random messages, then replay the whole transcript
    for _ in range(replay_checks):
        d = int(rng.integers(2, 10))
        oracle.tag([int(v) for v in rng.integers(1 << spec.width, size=d)])
    try:
        rec.consistent = _replay(rec, oracle, P)
    except ValueError as exc:        # e.g. the recovered keys give L = 0 for this nonce
        rec.notes.append(str(exc))
    return rec


def universal_forge(M, nonce: int, rec: ProstKeyRecovery, P: Permutation) -> TaggedCiphertext:
    """(C, T) for any message, computed from the recovered keys alone."""
    if rec is None or not rec.complete:
        raise ValueError("key recovery did not complete; nothing to forge with")
    spec = rec.L.spec
    inst = prost_new(EvenMansourCipher(rec.k1, rec.k2, P), spec, nonce)
    return prost_encrypt(inst, M)


__all__ = [
    "CiphertextTagOracle", "ForgeryOutcome", "ProstKeyRecovery", "RecoveryError",
    "build_fa_table", "build_fb_table", "build_fd4_table", "forge_otr", "forge_otr_d4",
    "build_fc_table", "find_L_period", "L_from_period", "recover_L",
    "build_fd_table", "recover_k1", "recover_k2", "attack_prost", "universal_forge",
]

