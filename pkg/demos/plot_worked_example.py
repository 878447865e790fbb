"""
Breaking a 9-pixel cipher from ten oracle answers
=================================================

A fixture oracle knows the decryptions of the zero ciphertext and the nine
unit impulses, nothing else.  That is enough to decrypt an eavesdropped
ciphertext it has never seen.
"""

from modattack import ModImage, build_atoms, recover, worked_example_oracle
from modattack.oracle import WORKED_EXAMPLE_CIPHERTEXT

oracle = worked_example_oracle()
atoms = build_atoms(oracle)
print("M0 =", atoms.base.tolist())
for i in range(9):
    print(f"dM{i + 1} =", atoms.diff(i).tolist())

# The eavesdropped ciphertext is not in the oracle's table; recovery is pure
# arithmetic on the atoms.
c = ModImage.vector(WORKED_EXAMPLE_CIPHERTEXT, 256)
m = recover(atoms, c)
print("recovered plaintext:", m.tolist())
print("oracle queries:", oracle.queries)
