"""Decryption oracles: the adversary's only access to the cipher.

Every oracle counts its queries under a lock so that concurrent callers
never lose an increment.  Ciphertext and plaintext dims may differ (border
insertion), which the attack handles without special cases.
"""

from __future__ import annotations

import re
import threading
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .algebra import ModImage
from .cipher import CipherSpec, decrypt, decrypt_batch
from .errors import DimensionError, FixtureMissError, FormatError
from .keyschedule import RoundMaterial


class DecryptionOracle:
    """Abstract decryption capability with exact query accounting.

    Subclasses implement :meth:`_decrypt`, and may override
    :meth:`_decrypt_many` with a vectorised version.
    """

    def __init__(self, cipher_dims: tuple[int, int], plain_dims: tuple[int, int], modulus: int):
        self.cipher_dims = tuple(cipher_dims)
        self.plain_dims = tuple(plain_dims)
        self.modulus = modulus
        self._queries = 0
        self._lock = threading.Lock()

    @property
    def queries(self) -> int:
        return self._queries

    @property
    def cipher_length(self) -> int:
        return self.cipher_dims[0] * self.cipher_dims[1]

    def _count(self, n: int) -> None:
        with self._lock:
            self._queries += n

    def _check(self, c: ModImage) -> None:
        if c.shape != self.cipher_dims or c.modulus != self.modulus:
            raise DimensionError(
                f"oracle takes {self.cipher_dims} images mod {self.modulus}, got {c.shape} mod {c.modulus}"
            )

    def decrypt(self, c: ModImage) -> ModImage:
        self._check(c)
        self._count(1)
        return self._decrypt(c)

    def decrypt_many(self, ciphertexts: np.ndarray) -> np.ndarray:
        """Decrypt an ``(n, LL)`` stack; counts as ``n`` queries."""
        ciphertexts = np.asarray(ciphertexts)
        if ciphertexts.ndim != 2 or ciphertexts.shape[1] != self.cipher_length:
            raise DimensionError(f"expected an (n, {self.cipher_length}) stack")
        self._count(ciphertexts.shape[0])
        return self._decrypt_many(ciphertexts)

    def _decrypt(self, c: ModImage) -> ModImage:
        raise NotImplementedError

    def _decrypt_many(self, ciphertexts: np.ndarray) -> np.ndarray:
        h, w = self.cipher_dims
        return np.stack([self._decrypt(ModImage(row, h, w, self.modulus)).pixels for row in ciphertexts])


class CipherOracle(DecryptionOracle):
    """Oracle backed by a real cipher instance."""

    def __init__(self, spec: CipherSpec, material: RoundMaterial, cipher_dims: tuple[int, int]):
        plain = spec.plaintext_dims(*cipher_dims)
        if plain[0] < 1 or plain[1] < 1:
            raise DimensionError(f"ciphertext dims {cipher_dims} too small for {spec.name}")
        super().__init__(cipher_dims, plain, spec.modulus)
        self.spec = spec
        self.material = material

    def _decrypt(self, c):
        return decrypt(self.spec, self.material, c)

    def _decrypt_many(self, ciphertexts):
        return decrypt_batch(self.spec, self.material, ciphertexts, self.cipher_dims)


def cipher_oracle(spec: CipherSpec, material: RoundMaterial, plain_height: int, plain_width: int) -> CipherOracle:
    """Oracle for ``plain_height x plain_width`` plaintexts under ``spec``."""
    return CipherOracle(spec, material, spec.ciphertext_dims(plain_height, plain_width))


class FixtureOracle(DecryptionOracle):
    """Oracle answering from a fixed ciphertext -> plaintext table.

    Lookups are keyed on exact pixel equality; anything not in the table
    raises :class:`FixtureMissError`.
    """

    def __init__(self, table: Mapping[tuple[int, ...], Sequence[int]], cipher_dims, plain_dims, modulus: int):
        super().__init__(cipher_dims, plain_dims, modulus)
        self.table = {}
        for c, m in table.items():
            c, m = tuple(int(v) for v in c), tuple(int(v) for v in m)
            if len(c) != self.cipher_length or len(m) != plain_dims[0] * plain_dims[1]:
                raise DimensionError("fixture entry does not match the oracle dims")
            self.table[c] = m

    def _decrypt(self, c):
        key = tuple(int(v) for v in c.pixels)
        try:
            m = self.table[key]
        except KeyError:
            raise FixtureMissError(f"no fixture answer for ciphertext {list(key)}") from None
        return ModImage(np.array(m), *self.plain_dims, self.modulus)


# Ten chosen ciphertexts of a 9-pixel, 8-bit instance and their decryptions:
# the zero image first, then unit impulses at positions 1..9.
WORKED_EXAMPLE_ANSWERS = (
    (85, 16, 228, 187, 2, 230, 109, 110, 193),
    (86, 14, 227, 189, 3, 230, 109, 110, 193),
    (85, 17, 226, 186, 4, 231, 109, 110, 193),
    (85, 16, 229, 185, 1, 232, 110, 110, 193),
    (84, 16, 228, 188, 0, 229, 111, 111, 193),
    (82, 15, 228, 187, 3, 228, 108, 112, 194),
    (85, 13, 227, 187, 2, 231, 107, 109, 195),
    (90, 16, 225, 186, 2, 230, 110, 108, 192),
    (86, 19, 227, 186, 2, 230, 109, 111, 191),
    (83, 15, 230, 188, 2, 230, 109, 110, 194),
)
WORKED_EXAMPLE_CIPHERTEXT = (29, 67, 144, 143, 74, 127, 101, 24, 139)
WORKED_EXAMPLE_PLAINTEXT = (0, 15, 33, 47, 65, 165, 56, 96, 255)


def worked_example_oracle() -> FixtureOracle:
    """Fixture oracle over a 1x9 image, G = 256, for the reference transcript.

    It knows only the zero ciphertext and the nine unit impulses; the
    eavesdropped ciphertext is deliberately absent.
    """
    table = {}
    for i, answer in enumerate(WORKED_EXAMPLE_ANSWERS):
        c = [0] * 9
        if i:
            c[i - 1] = 1
        table[tuple(c)] = answer
    return FixtureOracle(table, (1, 9), (1, 9), 256)


_FIXTURE_LINE = re.compile(r"^\s*([0-9,\s]+?)\s*->\s*([0-9,\s]+?)\s*$")


def parse_fixture_lines(lines) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Parse ``"c1,c2,... -> m1,m2,..."`` lines; ``#`` starts a comment."""
    table = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _FIXTURE_LINE.match(line)
        if not match:
            raise FormatError(f"line {lineno}: expected 'ciphertext-csv -> plaintext-csv'")
        try:
            c, m = (tuple(int(v) for v in part.split(",")) for part in match.groups())
        except ValueError:
            raise FormatError(f"line {lineno}: malformed integer list") from None
        table[c] = m
    if not table:
        raise FormatError("fixture file has no entries")
    return table


def load_fixture_oracle(path, modulus: int = 256, cipher_dims=None, plain_dims=None) -> FixtureOracle:
    """Fixture oracle from a transcript file; dims default to single rows."""
    with open(Path(path), encoding="utf-8") as fh:
        table = parse_fixture_lines(fh)
    c0, m0 = next(iter(table.items()))
    cipher_dims = cipher_dims or (1, len(c0))
    plain_dims = plain_dims or (1, len(m0))
    return FixtureOracle(table, cipher_dims, plain_dims, modulus)
