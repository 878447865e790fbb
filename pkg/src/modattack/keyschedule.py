"""Deterministic round material (one permutation and one mask per round).

Keystreams yield floats in ``[0, 1)``.  A mask residue is ``floor(u * G)``
and a shuffle draw picks ``floor(u * (i + 1))``, so one stream serves any
modulus and any image size.  The attack never looks at any of this; two
unrelated generators are provided to demonstrate exactly that.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .algebra import ModImage
from .errors import DimensionError, GenerationError, SeedError
from .permutation import Permutation, permutation_from_stream

BURN_IN = 1000

SeedLike = Union[bytes, str]


def decode_seed(seed: SeedLike) -> bytes:
    """Accept raw bytes or a lowercase hex string."""
    if isinstance(seed, str):
        try:
            seed = bytes.fromhex(seed)
        except ValueError as exc:
            raise SeedError(f"seed is not a hex string: {seed!r}") from exc
    if not isinstance(seed, (bytes, bytearray)) or len(seed) == 0:
        raise SeedError("seed must be a non-empty byte string")
    return bytes(seed)


class Keystream:
    """Single-consumer iterator of unit-interval draws with usage accounting."""

    def __init__(self):
        self.draws_used = 0

    def _next(self) -> float:
        raise NotImplementedError

    def __iter__(self) -> Iterator[float]:
        return self

    def __next__(self) -> float:
        u = self._next()
        self.draws_used += 1
        return u

    def residues(self, n: int, modulus: int) -> np.ndarray:
        """Next ``n`` draws quantised to residues ``floor(u * modulus)``."""
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            try:
                u = next(self)
            except StopIteration:
                raise GenerationError("keystream exhausted") from None
            out[i] = min(int(u * modulus), modulus - 1)
        return out


class LogisticSineStream(Keystream):
    """Iterates ``x <- (r x (1 - x) + (4 - r) sin(pi x) / 4) mod 1``.

    The first ``burn_in`` iterates are discarded.
    """

    def __init__(self, x0: float, r: float, burn_in: int = BURN_IN):
        super().__init__()
        if not 0.0 < x0 < 1.0:
            raise SeedError(f"initial condition {x0} outside (0, 1)")
        if not 0.0 < r <= 4.0:
            raise SeedError(f"control parameter {r} outside (0, 4]")
        self.r = r
        self.x = x0
        for _ in range(burn_in):
            self._step()

    def _step(self) -> float:
        x, r = self.x, self.r
        self.x = (r * x * (1.0 - x) + (4.0 - r) * math.sin(math.pi * x) / 4.0) % 1.0
        return self.x

    def _next(self) -> float:
        return self._step()


def logistic_sine_params(seed: SeedLike) -> tuple[float, float]:
    """Map a seed to ``(x0, r)`` through SHA-256.

    ``x0`` comes from the first 8 digest bytes, ``r`` from the next 8 and is
    placed in ``[1, 4)``.  A zero ``x0`` raises :class:`SeedError`.
    """
    digest = hashlib.sha256(b"logistic-sine" + decode_seed(seed)).digest()
    a, b = struct.unpack(">QQ", digest[:16])
    x0 = (a >> 11) * 2.0**-53
    r = 1.0 + 3.0 * (b >> 11) * 2.0**-53
    return x0, r


def logistic_sine_stream(seed: SeedLike, burn_in: int = BURN_IN) -> LogisticSineStream:
    x0, r = logistic_sine_params(seed)
    return LogisticSineStream(x0, r, burn_in)


class CounterStream(Keystream):
    """SHA-256 in counter mode; four 53-bit draws per block."""

    def __init__(self, seed: SeedLike):
        super().__init__()
        self.key = decode_seed(seed)
        self.counter = 0
        self._buffer: list[float] = []

    def _next(self) -> float:
        if not self._buffer:
            block = hashlib.sha256(self.key + self.counter.to_bytes(8, "big")).digest()
            self.counter += 1
            self._buffer = [(w >> 11) * 2.0**-53 for w in struct.unpack(">4Q", block)][::-1]
        return self._buffer.pop()


def counter_stream(seed: SeedLike) -> CounterStream:
    return CounterStream(seed)


GENERATORS = {"logistic": logistic_sine_stream, "counter": counter_stream}


def make_stream(seed: SeedLike, generator: str = "logistic") -> Keystream:
    try:
        factory = GENERATORS[generator]
    except KeyError:
        raise SeedError(f"unknown generator {generator!r}; choose from {sorted(GENERATORS)}") from None
    return factory(seed)


@dataclass(frozen=True)
class RoundKey:
    permutation: Permutation
    mask: np.ndarray  # residues, length L

    def mask_image(self, height: int, width: int, modulus: int) -> ModImage:
        return ModImage(self.mask, height, width, modulus)


@dataclass(frozen=True)
class RoundMaterial:
    rounds: tuple[RoundKey, ...]
    length: int
    modulus: int

    def __len__(self) -> int:
        return len(self.rounds)

    def __getitem__(self, i) -> RoundKey:
        return self.rounds[i]


def derive_round_material(stream: Keystream, rounds: int, length: int, modulus: int) -> RoundMaterial:
    """Draw ``rounds`` (permutation, mask) pairs of size ``length`` from one stream.

    Each round consumes ``length`` shuffle draws and then ``length`` mask draws.
    """
    if rounds < 1:
        raise DimensionError("at least one round is required")
    if length < 2:
        raise DimensionError("round material needs at least 2 pixels")
    keys = []
    for _ in range(rounds):
        w = permutation_from_stream(stream, length)
        k = stream.residues(length, modulus)
        k.setflags(write=False)
        keys.append(RoundKey(w, k))
    return RoundMaterial(tuple(keys), length, modulus)
