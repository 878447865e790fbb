"""Pixel-level permutations as index vectors.

A :class:`Permutation` stores ``source``: output pixel ``i`` is taken from
input pixel ``source[i]``, i.e. ``p[i] = m[source[i]]``.  Storage is 0-based;
:meth:`Permutation.from_one_based` and :meth:`Permutation.one_based` convert
to and from the 1-based notation used in the literature.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import ModImage
from .errors import DimensionError, GenerationError, ValidationError


class Permutation:
    __slots__ = ("source",)

    def __init__(self, source):
        src = np.array(source, dtype=np.int64).reshape(-1)
        n = src.size
        if n == 0:
            raise ValidationError("a permutation needs at least one index")
        seen = np.zeros(n, dtype=bool)
        if src.min() < 0 or src.max() >= n:
            raise ValidationError("permutation index out of range")
        seen[src] = True
        if not seen.all():
            raise ValidationError("index vector is not a bijection")
        src.setflags(write=False)
        self.source = src

    @classmethod
    def identity(cls, length: int) -> "Permutation":
        return cls(np.arange(length))

    @classmethod
    def from_one_based(cls, indices: Sequence[int]) -> "Permutation":
        return cls(np.asarray(indices, dtype=np.int64) - 1)

    def one_based(self) -> list[int]:
        return [int(i) + 1 for i in self.source]

    def __len__(self) -> int:
        return self.source.size

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.source, other.source)

    def __hash__(self):
        return hash(self.source.tobytes())

    def __repr__(self):
        return f"Permutation({self.one_based()!r})" if len(self) <= 16 else f"Permutation(L={len(self)})"

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.source, np.arange(len(self))))


def apply_pixels(w: Permutation, pixels: np.ndarray) -> np.ndarray:
    """Permute the last axis of ``pixels`` (batched arrays allowed)."""
    if pixels.shape[-1] != len(w):
        raise DimensionError(f"permutation of length {len(w)} applied to {pixels.shape[-1]} pixels")
    return pixels[..., w.source]


def apply(w: Permutation, m: ModImage) -> ModImage:
    """Permute ``m``: output pixel ``i`` is input pixel ``w.source[i]``.

    The output keeps the input's height and width; use :func:`rotation90`
    together with explicit dims when the permutation changes the shape.
    """
    return m.with_pixels(apply_pixels(w, m.pixels))


def invert(w: Permutation) -> Permutation:
    inv = np.empty(len(w), dtype=np.int64)
    inv[w.source] = np.arange(len(w))
    return Permutation(inv)


def compose(first: Permutation, second: Permutation) -> Permutation:
    """Permutation equivalent to applying ``first`` and then ``second``."""
    if len(first) != len(second):
        raise DimensionError("cannot compose permutations of different lengths")
    # apply(second, apply(first, m))[i] = m[first[second[i]]]
    return Permutation(first.source[second.source])


def rotation90(height: int, width: int) -> Permutation:
    """Clockwise quarter turn of an ``height x width`` image.

    The result, applied to the row-major scan of the image, yields the
    row-major scan of the ``width x height`` rotated image.
    """
    if height < 1 or width < 1:
        raise DimensionError("height and width must be positive")
    r, c = np.divmod(np.arange(height * width), height)
    # rotated[r, c] = original[height - 1 - c, r]
    return Permutation((height - 1 - c) * width + r)


def transpose(height: int, width: int) -> Permutation:
    """Column-by-column reading of an ``height x width`` image."""
    if height < 1 or width < 1:
        raise DimensionError("height and width must be positive")
    c, r = np.divmod(np.arange(height * width), height)
    return Permutation(r * width + c)


def permutation_from_stream(stream, length: int) -> Permutation:
    """Fisher-Yates shuffle driven by ``length`` draws from ``stream``.

    ``stream`` yields floats in ``[0, 1)``.  Position ``i`` (counting down
    from ``length - 1`` to ``0``) swaps with ``floor(u * (i + 1))``; the final
    draw is consumed for accounting and always picks position 0.
    """
    if length < 1:
        raise DimensionError("length must be positive")
    it = iter(stream)
    src = list(range(length))
    for i in range(length - 1, -1, -1):
        try:
            u = next(it)
        except StopIteration:
            raise GenerationError("keystream exhausted while shuffling") from None
        j = min(int(u * (i + 1)), i)
        src[i], src[j] = src[j], src[i]
    return Permutation(src)
