"""Fast consistency checks run by ``otrsimon selftest``."""

from __future__ import annotations

import numpy as np

from .cipher import EvenMansourCipher, KeyedCipher, random_permutation
from .gf2n import FieldSpec
from .mode import (InstanceError, otr_decrypt, otr_encrypt, otr_new, prost_decrypt,
                   prost_encrypt, prost_new, tag_from_ciphertext)
from .simon import (Gf2Basis, SimonSampler, dot, nullspace_1d, planted_period_table)

SEED = 20240601


def _instance(n=8, key=1):
    spec = FieldSpec(n)
    E = KeyedCipher(key, n)
    for nonce in range(1 << n):
        try:
            return otr_new(E, spec, nonce)
        except InstanceError:
            continue
    raise RuntimeError("no usable nonce")


def check_field_axioms():
    rng = np.random.default_rng(SEED)
    for n in (6, 8, 10):
        F = FieldSpec(n)
        for a, b, c in rng.integers(1 << n, size=(500, 3)).tolist():
            if F.mul(F.mul(a, b), c) != F.mul(a, F.mul(b, c)):
                return False
            if F.mul(a, b) != F.mul(b, a) or F.mul(a, b ^ c) != F.mul(a, b) ^ F.mul(a, c):
                return False
            if a and F.mul(a, F.inv(a)) != 1:
                return False
    return True


def check_field_constants():
    F = FieldSpec(8)
    return F.const(16) ^ F.const(26) == F.const(10) and F.mul(F.const(3), F.const(9)) ^ 1 == F.const(26)


def check_permutation_bijection():
    P = random_permutation(SEED, 8)
    return sorted(P.forward.tolist()) == list(range(256)) and all(P.inverse[P.forward] == np.arange(256))


def check_otr_roundtrip():
    rng = np.random.default_rng(SEED)
    for n in (6, 8):
        inst = _instance(n)
        for d in range(2, 10):
            for _ in range(20):
                M = tuple(rng.integers(1 << n, size=d).tolist())
                if otr_decrypt(inst, otr_encrypt(inst, M).C) != M:
                    return False
    return True


def check_prost_roundtrip():
    rng = np.random.default_rng(SEED)
    em = EvenMansourCipher(0x3C, 0xA5, random_permutation(SEED, 8))
    inst = prost_new(em, FieldSpec(8), 0x11)
    for d in range(2, 10):
        M = tuple(rng.integers(256, size=d).tolist())
        if prost_decrypt(inst, prost_encrypt(inst, M).C) != M:
            return False
    return True


def check_decrypt_closed_forms():
    # M[2] and M[4] written directly in terms of C for d = 5
    rng = np.random.default_rng(SEED)
    inst = _instance()
    F, E, dl = inst.spec, inst.E, inst.delta.value
    k = lambda c: F.mul(F.const(c), dl)  # noqa: E731
    for _ in range(50):
        M = rng.integers(256, size=5).tolist()
        C = otr_encrypt(inst, M).C
        if int(E(k(4) ^ int(E(k(5) ^ C[0])) ^ C[1])) ^ C[0] != M[1]:
            return False
        if int(E(k(8) ^ int(E(k(9) ^ C[2])) ^ C[3])) ^ C[2] != M[3]:
            return False
    return True


def _tag_paths_agree(d):
    rng = np.random.default_rng(SEED + d)
    inst = _instance()
    for _ in range(200):
        ct = otr_encrypt(inst, rng.integers(256, size=d).tolist())
        if tag_from_ciphertext(inst, ct.C) != ct.T:
            return False
    return True


def check_tag_closed_form_d5():
    return _tag_paths_agree(5)


def check_tag_closed_form_d4():
    return _tag_paths_agree(4)


def check_simon_orthogonality():
    rng = np.random.default_rng(SEED)
    f = planted_period_table(8, 0xB7, rng)
    ys = SimonSampler(f).sample(rng, size=2000)
    return all(dot(int(y), 0xB7) == 0 for y in ys)


def check_nullspace():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        s = int(rng.integers(1, 1 << 10))
        f = planted_period_table(10, s, rng)
        sampler = SimonSampler(f)
        basis = Gf2Basis(10)
        while basis.rank < 9:
            basis.add(sampler.sample(rng))
        if nullspace_1d(basis) != s:
            return False
    return True


CHECKS = [
    ("field-axioms", check_field_axioms),
    ("field-constants", check_field_constants),
    ("permutation-bijection", check_permutation_bijection),
    ("otr-roundtrip", check_otr_roundtrip),
    ("prost-roundtrip", check_prost_roundtrip),
    ("decrypt-closed-forms-d5", check_decrypt_closed_forms),
    ("tag-closed-form-d5", check_tag_closed_form_d5),
    ("tag-closed-form-d4", check_tag_closed_form_d4),
    ("simon-orthogonality", check_simon_orthogonality),
    ("gf2-nullspace", check_nullspace),
]


def run_checks(out, err) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # a crash is a failed check, reported by name
            passed = False
            print(f"{name}: {type(exc).__name__}: {exc}", file=err)
        print(f"{'PASS' if passed else 'FAIL'} {name}", file=out)
        if not passed:
            print(f"selftest failed: {name}", file=err)
            ok = False
    return ok
