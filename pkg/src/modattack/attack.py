"""Keyless plaintext recovery from a decryption oracle.

Decrypt the zero ciphertext and every unit impulse once.  The answers give a
base plaintext ``M0`` and one plaintext differential ("atom") per ciphertext
pixel.  Because decryption of every modular family member is affine over
``Z/G``, any ciphertext ``C`` then decrypts to

    M = M0 + sum_i C[i] * atom_i   (mod G)

without touching the oracle again.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp

from .algebra import ModImage, SparseDifferential, modmatvec
from .cipher import CipherSpec, encrypt, keygen
from .errors import DimensionError, ProtocolError
from .keyschedule import SeedLike
from .oracle import CipherOracle, DecryptionOracle, cipher_oracle

log = logging.getLogger(__name__)

DEFAULT_BATCH = 512


@dataclass(frozen=True, eq=False)
class AttackAtoms:
    """``base`` plus one plaintext differential per ciphertext pixel.

    ``diffs`` is a dense ``(LL, L)`` residue array or a CSR sparse matrix of
    the same shape; row ``i`` is the atom of ciphertext pixel ``i``.
    """

    base: ModImage
    diffs: Union[np.ndarray, sp.csr_array]
    cipher_dims: tuple[int, int]

    def __post_init__(self):
        if self.diffs.shape != (self.ciphertext_len, len(self.base)):
            raise DimensionError(
                f"atoms of shape {self.diffs.shape} do not match "
                f"{self.ciphertext_len} ciphertext pixels x {len(self.base)} plaintext pixels"
            )

    @property
    def modulus(self) -> int:
        return self.base.modulus

    @property
    def plain_dims(self) -> tuple[int, int]:
        return self.base.shape

    @property
    def ciphertext_len(self) -> int:
        return self.cipher_dims[0] * self.cipher_dims[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.diffs)

    def __len__(self) -> int:
        return self.ciphertext_len

    def diff(self, i: int) -> Union[ModImage, SparseDifferential]:
        h, w = self.plain_dims
        if self.is_sparse:
            row = self.diffs[[i], :].tocoo()
            order = np.argsort(row.col)
            return SparseDifferential(row.col[order], row.data[order], h, w, self.modulus)
        return ModImage(self.diffs[i], h, w, self.modulus)

    def nnz_per_atom(self) -> np.ndarray:
        if self.is_sparse:
            return np.diff(self.diffs.indptr)
        return np.count_nonzero(self.diffs, axis=1)

    def density(self) -> float:
        """Mean fraction of non-zero entries per atom."""
        return float(self.nnz_per_atom().mean()) / len(self.base)


def _impulses(start: int, stop: int, length: int) -> np.ndarray:
    block = np.zeros((stop - start, length), dtype=np.int64)
    block[np.arange(stop - start), np.arange(start, stop)] = 1
    return block


def build_atoms(oracle: DecryptionOracle, jobs: int = 1, batch: int = DEFAULT_BATCH) -> AttackAtoms:
    """Query the zero ciphertext and all ``LL`` unit impulses (``LL + 1`` queries).

    Impulse queries are sent in blocks of ``batch`` through
    :meth:`DecryptionOracle.decrypt_many`; with ``jobs > 1`` blocks are issued
    from a thread pool.  Answer order does not matter: atoms are indexed by
    impulse position.
    """
    ch, cw = oracle.cipher_dims
    n = ch * cw
    if n < 1:
        raise DimensionError("ciphertext must have at least one pixel")
    G = oracle.modulus
    m0 = oracle.decrypt(ModImage.zeros(ch, cw, G))
    if m0.shape != tuple(oracle.plain_dims):
        raise ProtocolError(f"oracle answered {m0.shape}, announced {oracle.plain_dims}")

    def run(bounds):
        start, stop = bounds
        answers = np.asarray(oracle.decrypt_many(_impulses(start, stop, n)))
        if answers.shape != (stop - start, len(m0)):
            raise ProtocolError(f"oracle answers of shape {answers.shape} drifted from {m0.shape}")
        return start, (answers - m0.pixels) % G

    blocks = [(s, min(s + batch, n)) for s in range(0, n, batch)]
    diffs = np.empty((n, len(m0)), dtype=m0.pixels.dtype)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = map(run, blocks)
    for start, block in results:
        diffs[start : start + block.shape[0]] = block
    diffs.setflags(write=False)
    return AttackAtoms(m0, diffs, (ch, cw))


def recover(atoms: AttackAtoms, c: ModImage) -> ModImage:
    """Plaintext of ``c``: the ``c``-weighted modular sum of the atoms plus ``M0``.

    Makes no oracle queries and does not judge whether ``c`` is a genuine
    ciphertext.
    """
    if len(c) != atoms.ciphertext_len:
        raise DimensionError(f"ciphertext has {len(c)} pixels, atoms expect {atoms.ciphertext_len}")
    if c.modulus != atoms.modulus:
        raise DimensionError(f"ciphertext modulus {c.modulus} != atoms modulus {atoms.modulus}")
    delta = modmatvec(c.pixels, atoms.diffs, atoms.modulus)
    return atoms.base.with_pixels((delta + atoms.base.pixels) % atoms.modulus)


def sparsify_atoms(atoms: AttackAtoms, budget: int | None = None) -> AttackAtoms:
    """Convert atoms to CSR storage.

    If ``budget`` (max non-zeros per atom) is exceeded the conversion still
    happens; the measured density is logged instead of raising.
    """
    if atoms.is_sparse:
        sparse = atoms.diffs
    else:
        sparse = sp.csr_array(np.asarray(atoms.diffs))
        sparse.eliminate_zeros()
        sparse.sort_indices()
    out = AttackAtoms(atoms.base, sparse, atoms.cipher_dims)
    if budget is not None:
        worst = int(out.nnz_per_atom().max())
        if worst > budget:
            log.warning("atom budget %d exceeded: max nnz %d, density %.4f", budget, worst, out.density())
    return out


@dataclass
class AttackReport:
    preset: str
    plain_dims: tuple[int, int]
    cipher_dims: tuple[int, int]
    modulus: int
    rounds: int
    queries_used: int
    atoms_nnz_total: int
    max_atom_nnz: int
    recoveries: list[tuple[str, bool]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return bool(self.recoveries) and all(ok for _, ok in self.recoveries)


def attack_end_to_end(spec: CipherSpec, seed: SeedLike, plaintext: ModImage, *,
                      generator: str = "logistic", oracle_seed: SeedLike | None = None,
                      sparse: bool = False, rng=None) -> tuple[AttackReport, ModImage]:
    """Encrypt ``plaintext`` under ``(spec, seed)`` and break it.

    The oracle is keyed with ``oracle_seed`` (default: ``seed``), so passing a
    different seed models atoms built against a different deployment.
    """
    h, w = plaintext.shape
    timings = {}
    t0 = time.perf_counter()
    material = keygen(spec, seed, h, w, generator)
    ciphertext = encrypt(spec, material, plaintext, rng=rng)
    timings["encrypt"] = time.perf_counter() - t0

    if oracle_seed is None:
        oracle_material = material
    else:
        oracle_material = keygen(spec, oracle_seed, h, w, generator)
    oracle: CipherOracle = cipher_oracle(spec, oracle_material, h, w)

    t0 = time.perf_counter()
    atoms = build_atoms(oracle)
    if sparse:
        atoms = sparsify_atoms(atoms)
    timings["build_atoms"] = time.perf_counter() - t0
    queries = oracle.queries

    t0 = time.perf_counter()
    recovered = recover(atoms, ciphertext)
    timings["recover"] = time.perf_counter() - t0
    if oracle.queries != queries:
        raise ProtocolError("recovery queried the oracle")

    nnz = atoms.nnz_per_atom()
    report = AttackReport(
        preset=spec.name,
        plain_dims=(h, w),
        cipher_dims=ciphertext.shape,
        modulus=spec.modulus,
        rounds=spec.rounds,
        queries_used=queries,
        atoms_nnz_total=int(nnz.sum()),
        max_atom_nnz=int(nnz.max()),
        recoveries=[("eavesdropped", recovered == plaintext)],
        timings=timings,
    )
    return report, recovered
