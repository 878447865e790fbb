"""
Images, atoms and the command line
==================================

Atoms survive on disk, so the oracle is needed once and recovery can run
later and elsewhere.  16-bit images go through PGM with maxval 65535.
The same workflow is available as ``modattack`` subcommands.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from modattack import ModImage, build_atoms, cipher_oracle, encrypt, keygen, preset, recover
from modattack.fileio import load_atoms, read_pgm, save_atoms, write_pgm

work = Path(tempfile.mkdtemp())
G = 65536
spec = preset("hua_ma", modulus=G)
material = keygen(spec, "1616", 20, 30)
m = ModImage(np.random.default_rng(4).integers(0, G, 600), 20, 30, G)
write_pgm(work / "plain.pgm", m)
write_pgm(work / "cipher.pgm", encrypt(spec, material, m))

save_atoms(work / "hua_ma.atoms", build_atoms(cipher_oracle(spec, material, 20, 30)))
atoms = load_atoms(work / "hua_ma.atoms")
print("atoms file:", (work / "hua_ma.atoms").stat().st_size, "bytes")
print("recovered from disk:", recover(atoms, read_pgm(work / "cipher.pgm")) == m)

# The command-line equivalent, with JSON reports on stdout.
cli = [sys.executable, "-m", "modattack"]
subprocess.run(cli + ["build-atoms", "--preset", "hua_ma", "--seed", "1616", "--depth", "16",
                      "--height", "20", "--width", "30", "--atoms", str(work / "cli.atoms")], check=True)
subprocess.run(cli + ["recover", "--atoms", str(work / "cli.atoms"),
                      str(work / "cipher.pgm"), str(work / "out.pgm")], check=True)
print("CLI recovery matches:", read_pgm(work / "out.pgm") == m)
