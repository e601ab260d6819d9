"""Ground truth for the attacks, computed from an instance's secrets.

Used by the tests, the self-test and the experiment reports to check what the
attacks find against what the algebra predicts.  Attack code never imports
this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import CiphertextTagOracle, build_fa_table, build_fb_table, build_fd4_table
from .mode import OtrInstance, ProstOtrInstance, TaggedCiphertext, otr_verify, tag_from_ciphertext
from .simon import brute_force_periods


def _k(inst: OtrInstance, c: int) -> int:
    return inst.spec.mul(inst.spec.const(c), inst.delta.value)


def fb_period(inst: OtrInstance, ct: TaggedCiphertext) -> int:
    """tau ^ 12 delta ^ E(5 delta ^ C1) ^ E(9 delta ^ C3)."""
    c1, c2, c3, c4, _ = ct.C
    E = inst.E
    return (c2 ^ c4) ^ _k(inst, 12) ^ int(E(_k(inst, 5) ^ c1)) ^ int(E(_k(inst, 9) ^ c3))


def fd4_period(inst: OtrInstance, ct: TaggedCiphertext) -> int:
    """gamma ^ 12 delta ^ E(5 delta ^ C1) ^ E(9 delta ^ C4)."""
    c1, c2, c3, c4 = ct.C
    E = inst.E
    return (c2 ^ c3) ^ _k(inst, 12) ^ int(E(_k(inst, 5) ^ c1)) ^ int(E(_k(inst, 9) ^ c4))


def fc_period(inst: ProstOtrInstance, c: int) -> int:
    return c ^ inst.spec.mul(inst.spec.const(10), inst.L.value)


def fd_period(inst: ProstOtrInstance) -> int:
    return inst.em.k1


@dataclass
class FaVerdict:
    """Which periods the f_a table really has, next to the claimed 13 delta ^ theta."""

    periods: set
    claimed: int          # 13 delta ^ theta
    claimed_holds: bool
    swap_candidate: int   # 12 delta ^ theta, the value the inner-mask swap needs
    swap_holds: bool
    planted: bool         # C2 ^ C4 == 12 delta

    def line(self) -> str:
        found = ",".join(f"{p:#x}" for p in sorted(self.periods)) or "none"
        return (f"periods={found} claimed13={self.claimed:#x}:{'yes' if self.claimed_holds else 'no'} "
                f"swap12={self.swap_candidate:#x}:{'yes' if self.swap_holds else 'no'} "
                f"planted={'yes' if self.planted else 'no'}")


def fa_verdict(inst: OtrInstance, ct: TaggedCiphertext) -> FaVerdict:
    table = build_fa_table(ct, CiphertextTagOracle(inst))
    periods = brute_force_periods(table)
    theta = ct.C[0] ^ ct.C[2]
    claimed = _k(inst, 13) ^ theta
    swap = _k(inst, 12) ^ theta
    return FaVerdict(periods, claimed, claimed in periods, swap, swap in periods,
                     (ct.C[1] ^ ct.C[3]) == _k(inst, 12))


def planted_fa_ciphertext(inst: OtrInstance, rng: np.random.Generator) -> TaggedCiphertext:
    """A valid d = 5 pair with C2 ^ C4 = 12 delta, where f_a does have a period."""
    C = [int(v) for v in rng.integers(1 << inst.spec.width, size=5)]
    C[3] = C[1] ^ _k(inst, 12)
    return TaggedCiphertext(tuple(C), tag_from_ciphertext(inst, C))


def claimed_forgery_d5(inst: OtrInstance, ct: TaggedCiphertext) -> tuple:
    """Odd-position swap with delta multiples: 13d^C3 || 12d^C4 || 13d^C1 || 12d^C2 || C5."""
    c1, c2, c3, c4, c5 = ct.C
    k12, k13 = _k(inst, 12), _k(inst, 13)
    return (k13 ^ c3, k12 ^ c4, k13 ^ c1, k12 ^ c2, c5)


def claimed_forgery_d4(inst: OtrInstance, ct: TaggedCiphertext) -> tuple:
    """The d = 4 analogue: 13d^C4 || 12d^C3 || 12d^C2 || 13d^C1 (d standing for delta)."""
    c1, c2, c3, c4 = ct.C
    k12, k13 = _k(inst, 12), _k(inst, 13)
    return (k13 ^ c4, k12 ^ c3, k12 ^ c2, k13 ^ c1)


def claimed_forgery_verdict(inst: OtrInstance, ct: TaggedCiphertext) -> bool:
    build = claimed_forgery_d5 if ct.d == 5 else claimed_forgery_d4
    return otr_verify(inst, TaggedCiphertext(build(inst, ct), ct.T))


def fb_periods(inst: OtrInstance, ct: TaggedCiphertext) -> set:
    return brute_force_periods(build_fb_table(ct, CiphertextTagOracle(inst)))


def fd4_periods(inst: OtrInstance, ct: TaggedCiphertext) -> set:
    return brute_force_periods(build_fd4_table(ct, CiphertextTagOracle(inst)))
