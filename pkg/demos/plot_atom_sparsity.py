"""
How many plaintext pixels one ciphertext pixel touches
======================================================

Each atom is the plaintext differential of one ciphertext impulse.  Plain
modular addition leaves atoms with a single non-zero pixel.  Chaining and
filtering spread them, and border frames spread them further.  Sparse
storage keeps recovery cheap when atoms stay narrow.
"""

import time

import numpy as np

from modattack import ModImage, build_atoms, cipher_oracle, keygen, preset, recover, sparsify_atoms
from modattack.cipher import MODULAR_PRESETS

for name in MODULAR_PRESETS:
    spec = preset(name)
    atoms = build_atoms(cipher_oracle(spec, keygen(spec, "5a", 16, 16), 16, 16))
    nnz = atoms.nnz_per_atom()
    print(f"{name:<17} mean nnz {nnz.mean():7.2f}  max {nnz.max():4d}  density {atoms.density():.4f}")

spec = preset("zhou")
dense = build_atoms(cipher_oracle(spec, keygen(spec, "5a", 64, 64), 64, 64))
sparse = sparsify_atoms(dense)
c = ModImage(np.random.default_rng(3).integers(0, 256, 64 * 64), 64, 64, 256)
for label, atoms in (("dense", dense), ("sparse", sparse)):
    t0 = time.perf_counter()
    out = recover(atoms, c)
    print(f"{label:<6} recovery of a 64x64 image: {time.perf_counter() - t0:.4f}s")
print("identical:", recover(dense, c) == recover(sparse, c))
