"""Simulated quantum forgery attacks on OTR and Prost-OTR-Even-Mansour."""

from .gf2n import BinaryField, FieldElement, FieldSpec
from .cipher import EvenMansourCipher, KeyedCipher, Permutation, random_permutation
from .mode import OtrInstance, ProstOtrInstance, TaggedCiphertext
from .simon import BooleanFunctionTable, Gf2Basis, PeriodResult

__version__ = "0.1.0"
