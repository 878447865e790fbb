"""Residue-vector arithmetic modulo G and the image data model.

Every image, mask, and differential in this package is a :class:`ModImage`:
a flat, row-major vector of residues in ``[0, G)`` with height/width
metadata.  Pixel indices are 0-based in storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError

# Largest modulus whose products and short sums stay exact in int64.
_INT64_SAFE_MODULUS = 2**31


def residue_dtype(modulus: int):
    """dtype used for arithmetic on residues of ``modulus``."""
    return np.int64 if modulus <= _INT64_SAFE_MODULUS else object


def as_residues(values, modulus: int) -> np.ndarray:
    """Copy ``values`` into a residue array, checking the range."""
    arr = np.asarray(values)
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.integer):
        if arr.size and not all(float(v).is_integer() for v in arr.ravel()):
            raise DomainError("pixel values must be integers")
    arr = np.array(arr, dtype=residue_dtype(modulus))
    if arr.size and (arr.min() < 0 or arr.max() >= modulus):
        raise DomainError(f"pixel values must lie in [0, {modulus})")
    return arr


@dataclass(frozen=True, eq=False)
class ModImage:
    """An ``height x width`` image of residues modulo ``modulus``.

    ``pixels`` is stored flat in row-major scan order and is read-only.
    """

    pixels: np.ndarray
    height: int
    width: int
    modulus: int

    def __post_init__(self):
        if int(self.modulus) < 2:
            raise DomainError("modulus must be at least 2")
        if self.height < 1 or self.width < 1:
            raise DimensionError("height and width must be positive")
        pixels = as_residues(self.pixels, self.modulus).reshape(-1)
        if pixels.size != self.height * self.width:
            raise DimensionError(
                f"{pixels.size} pixels do not fill a {self.height}x{self.width} image"
            )
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "modulus", int(self.modulus))

    @classmethod
    def from_array(cls, array, modulus: int) -> "ModImage":
        """Build from a 2-D array (or a 1-D vector, taken as a single row)."""
        arr = np.asarray(array)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise DimensionError("expected a 1-D or 2-D array")
        return cls(arr.reshape(-1), arr.shape[0], arr.shape[1], modulus)

    @classmethod
    def vector(cls, values: Sequence[int], modulus: int) -> "ModImage":
        return cls.from_array(np.asarray(values).reshape(1, -1), modulus)

    @classmethod
    def zeros(cls, height: int, width: int, modulus: int) -> "ModImage":
        return cls(np.zeros(height * width, dtype=np.int64), height, width, modulus)

    @classmethod
    def impulse(cls, index: int, height: int, width: int, modulus: int) -> "ModImage":
        """Image that is 1 at flat position ``index`` (0-based) and 0 elsewhere."""
        pixels = np.zeros(height * width, dtype=np.int64)
        pixels[index] = 1
        return cls(pixels, height, width, modulus)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def __len__(self) -> int:
        return self.pixels.size

    def to_array(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width).copy()

    def tolist(self) -> list[int]:
        return [int(v) for v in self.pixels]

    def with_pixels(self, pixels, height: int | None = None, width: int | None = None) -> "ModImage":
        """New image of the same modulus (and by default the same shape)."""
        return ModImage(
            np.asarray(pixels).reshape(-1),
            self.height if height is None else height,
            self.width if width is None else width,
            self.modulus,
        )

    def __eq__(self, other):
        if not isinstance(other, ModImage):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.modulus == other.modulus
            and np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.shape, self.modulus, self.pixels.tobytes()))

    def __repr__(self):
        body = np.array2string(np.asarray(self.pixels, dtype=object), threshold=12)
        return f"ModImage({self.height}x{self.width}, G={self.modulus}, {body})"


@dataclass(frozen=True, eq=False)
class SparseDifferential:
    """A differential stored as its non-zero ``(index, value)`` entries.

    Indices are 0-based, strictly increasing; values lie in ``[1, G)``.
    """

    indices: np.ndarray
    values: np.ndarray
    height: int
    width: int
    modulus: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        vals = as_residues(self.values, self.modulus).reshape(-1)
        if idx.size != vals.size:
            raise DimensionError("indices and values differ in length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.length or np.any(np.diff(idx) <= 0):
                raise DomainError("indices must be strictly increasing and in range")
            if np.any(vals == 0):
                raise DomainError("sparse entries must be non-zero")
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return self.height * self.width

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @classmethod
    def from_dense(cls, image: ModImage) -> "SparseDifferential":
        nz = np.flatnonzero(image.pixels)
        return cls(nz, image.pixels[nz], image.height, image.width, image.modulus)

    def to_dense(self) -> ModImage:
        pixels = np.zeros(self.length, dtype=residue_dtype(self.modulus))
        pixels[self.indices] = self.values
        return ModImage(pixels, self.height, self.width, self.modulus)

    def entries(self) -> list[tuple[int, int]]:
        return [(int(i), int(v)) for i, v in zip(self.indices, self.values)]

    def __eq__(self, other):
        if not isinstance(other, SparseDifferential):
            return NotImplemented
        return (
            self.height == other.height
            and self.width == other.width
            and self.modulus == other.modulus
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )


Differential = Union[ModImage, SparseDifferential]


def _check_pair(a: ModImage, b: ModImage) -> None:
    if a.modulus != b.modulus:
        raise DimensionError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def mod_add(a: ModImage, b: ModImage) -> ModImage:
    _check_pair(a, b)
    return a.with_pixels((a.pixels + b.pixels) % a.modulus)


def mod_sub(a: ModImage, b: ModImage) -> ModImage:
    _check_pair(a, b)
    return a.with_pixels((a.pixels - b.pixels) % a.modulus)


def scalar_mul(scalar: int, a: ModImage) -> ModImage:
    scalar = int(scalar)
    if not 0 <= scalar < a.modulus:
        raise DomainError(f"scalar {scalar} outside [0, {a.modulus})")
    return a.with_pixels((scalar * a.pixels) % a.modulus)


def modmatvec(weights: np.ndarray, matrix, modulus: int) -> np.ndarray:
    """``sum_i weights[i] * matrix[i]`` reduced mod ``modulus``.

    ``matrix`` is a dense ``(n, L)`` array or a scipy sparse matrix.  Rows are
    processed in chunks small enough that int64 accumulation cannot overflow.
    """
    weights = np.asarray(weights, dtype=residue_dtype(modulus)) % modulus
    if residue_dtype(modulus) is object:
        dense = matrix.toarray() if hasattr(matrix, "toarray") else matrix
        acc = np.zeros(dense.shape[1], dtype=object)
        for w, row in zip(weights, np.asarray(dense, dtype=object)):
            acc = (acc + w * row) % modulus
        return acc
    bound = (modulus - 1) ** 2
    chunk = max(1, (2**62) // max(bound, 1))
    n = matrix.shape[0]
    acc = np.zeros(matrix.shape[1], dtype=np.int64)
    for start in range(0, n, chunk):
        part = matrix[start : start + chunk]
        w = weights[start : start + chunk]
        acc = (acc + np.asarray(part.T @ w).reshape(-1)) % modulus
    return acc


def weighted_modsum(weights: Sequence[int], terms: Sequence[Differential]) -> ModImage:
    """Modular weighted sum of differentials, dense or sparse.

    Returns ``sum_i weights[i] * terms[i]`` as a dense :class:`ModImage`.
    """
    terms = list(terms)
    weights = [int(w) for w in weights]
    if not terms:
        raise DomainError("weighted_modsum needs at least one term")
    if len(weights) != len(terms):
        raise DimensionError(f"{len(weights)} weights for {len(terms)} terms")
    first = terms[0]
    shape, modulus = (first.height, first.width), first.modulus
    for t in terms:
        if (t.height, t.width) != shape or t.modulus != modulus:
            raise DimensionError("all terms must share shape and modulus")
    for w in weights:
        if not 0 <= w < modulus:
            raise DomainError(f"weight {w} outside [0, {modulus})")

    dtype = residue_dtype(modulus)
    acc = np.zeros(shape[0] * shape[1], dtype=dtype)
    for w, t in zip(weights, terms):
        if w == 0:
            continue
        if isinstance(t, SparseDifferential):
            acc[t.indices] = (acc[t.indices] + w * t.values) % modulus
        else:
            acc = (acc + w * t.pixels) % modulus
    return ModImage(acc, shape[0], shape[1], modulus)


def stack_pixels(images: Iterable[ModImage]) -> np.ndarray:
    """Stack images into an ``(n, L)`` array (shape/modulus must agree)."""
    images = list(images)
    for img in images[1:]:
        _check_pair(images[0], img)
    return np.stack([img.pixels for img in images])
