"""Permutation-substitution image ciphers with modular substitution, and a
keyless chosen-ciphertext attack that decrypts any of them."""

from .algebra import ModImage, SparseDifferential, mod_add, mod_sub, scalar_mul, weighted_modsum
from .attack import AttackAtoms, AttackReport, attack_end_to_end, build_atoms, recover, sparsify_atoms
from .cipher import (
    MODULAR_PRESETS,
    PRESET_NAMES,
    CipherSpec,
    Order,
    border_strip,
    border_wrap,
    decrypt,
    encrypt,
    keygen,
    preset,
)
from .oracle import CipherOracle, DecryptionOracle, FixtureOracle, cipher_oracle, worked_example_oracle
from .permutation import Permutation

__version__ = "0.1.0"
