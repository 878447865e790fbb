"""Iterated permutation-substitution ciphers built from the pieces above.

Round ``i`` permutes with its permutation and substitutes with its mask, in
the order the :class:`CipherSpec` prescribes.  Optional extras:

* ``rotation``: a clockwise quarter turn folded into each round's permutation
  (the working image's height and width swap every round);
* ``column_scan``: substitution runs over the column-by-column reading of the
  permuted image, realised by folding a transpose into the permutation;
* ``border_insertion``: a fresh random one-pixel frame is pasted around the
  plaintext before the rounds and stripped after decryption.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

import numpy as np

from .algebra import ModImage, as_residues
from .errors import ConfigurationError, DimensionError, GenerationError, PresetNotFound
from .keyschedule import RoundKey, RoundMaterial, SeedLike, derive_round_material, make_stream
from .permutation import Permutation, apply_pixels, compose, invert, rotation90, transpose
from .substitution import (
    FILTERING,
    MOD_ADD,
    MOD_ADD_CHAIN1,
    MOD_ADD_CHAIN2,
    MOD_SUB,
    XOR_CONTROL,
    SubstitutionVariant,
    Tag,
    decrypt_pixels,
    encrypt_pixels,
)

Randomness = Union[np.random.Generator, Iterable[int]]


class Order(str, Enum):
    PERMUTE_THEN_SUBSTITUTE = "permute_then_substitute"
    SUBSTITUTE_THEN_PERMUTE = "substitute_then_permute"


@dataclass(frozen=True)
class CipherSpec:
    variant: SubstitutionVariant
    order: Order = Order.PERMUTE_THEN_SUBSTITUTE
    rounds: int = 1
    border_insertion: bool = False
    modulus: int = 256
    rotation: bool = False
    column_scan: bool = False
    name: str = "custom"

    def __post_init__(self):
        if self.rounds < 1:
            raise ConfigurationError("rounds must be at least 1")
        if self.modulus < 2:
            raise ConfigurationError("modulus must be at least 2")
        object.__setattr__(self, "order", Order(self.order))

    def with_rounds(self, rounds: int) -> "CipherSpec":
        return replace(self, rounds=rounds)

    def working_dims(self, height: int, width: int) -> tuple[int, int]:
        """Dims of the image entering the first round."""
        return (height + 2, width + 2) if self.border_insertion else (height, width)

    def ciphertext_dims(self, height: int, width: int) -> tuple[int, int]:
        h, w = self.working_dims(height, width)
        if self.rotation and self.rounds % 2:
            h, w = w, h
        return h, w

    def plaintext_dims(self, cipher_height: int, cipher_width: int) -> tuple[int, int]:
        h, w = cipher_height, cipher_width
        if self.rotation and self.rounds % 2:
            h, w = w, h
        if self.border_insertion:
            h, w = h - 2, w - 2
        return h, w


_PTS = Order.PERMUTE_THEN_SUBSTITUTE
_STP = Order.SUBSTITUTE_THEN_PERMUTE

_PRESETS = {
    "basic": dict(variant=MOD_ADD, order=_PTS, rounds=2),
    "lan": dict(variant=MOD_SUB, order=_STP, rounds=4),
    "zhou": dict(variant=MOD_ADD_CHAIN2, order=_STP, rounds=2),
    "hua_ma": dict(variant=MOD_ADD_CHAIN1, order=_PTS, rounds=2, border_insertion=True, column_scan=True),
    "borujeni": dict(variant=MOD_ADD, order=_PTS, rounds=1),
    "hua2018": dict(variant=MOD_ADD_CHAIN2, order=_PTS, rounds=4),
    "hua2015": dict(variant=MOD_ADD_CHAIN1, order=_PTS, rounds=2, rotation=True),
    "cosine": dict(variant=MOD_ADD_CHAIN1, order=_PTS, rounds=4, rotation=True),
    "filtering": dict(variant=FILTERING, order=_PTS, rounds=2),
    "filtering_border": dict(variant=FILTERING, order=_PTS, rounds=4, border_insertion=True),
    "xor_control": dict(variant=XOR_CONTROL, order=_PTS, rounds=2),
}

PRESET_NAMES = tuple(_PRESETS)
MODULAR_PRESETS = tuple(n for n in _PRESETS if _PRESETS[n]["variant"].is_modular)


def preset(name: str, rounds: int | None = None, modulus: int = 256,
           kernel: Iterable[tuple[int, int]] | None = None) -> CipherSpec:
    """Named member of the cipher family.

    ``rounds`` overrides the preset's round count; ``kernel`` replaces the
    default filtering kernel for the filtering presets.
    """
    try:
        params = dict(_PRESETS[name])
    except KeyError:
        raise PresetNotFound(f"unknown preset {name!r}; choose from {', '.join(_PRESETS)}") from None
    if rounds is not None:
        params["rounds"] = rounds
    if kernel is not None:
        if params["variant"].tag is not Tag.FILTERING:
            raise ConfigurationError(f"preset {name!r} does not take a kernel")
        params["variant"] = SubstitutionVariant(Tag.FILTERING, tuple(kernel))
    return CipherSpec(modulus=modulus, name=name, **params)


def keygen(spec: CipherSpec, seed: SeedLike, height: int, width: int,
           generator: str = "logistic") -> RoundMaterial:
    """Round material for ``height x width`` plaintexts under ``spec``."""
    h, w = spec.working_dims(height, width)
    return derive_round_material(make_stream(seed, generator), spec.rounds, h * w, spec.modulus)


def round_permutation(spec: CipherSpec, key: RoundKey, dims: tuple[int, int]) -> tuple[Permutation, tuple[int, int]]:
    """The round's single effective permutation and the dims it produces."""
    h, w = dims
    perm = key.permutation
    if spec.column_scan:
        perm = compose(perm, transpose(h, w))
    if spec.rotation:
        perm = compose(perm, rotation90(h, w))
        return perm, (w, h)
    return perm, (h, w)


def _check_material(spec: CipherSpec, material: RoundMaterial, length: int) -> None:
    if len(material) < spec.rounds:
        raise ConfigurationError(f"spec needs {spec.rounds} rounds, material has {len(material)}")
    if material.length != length:
        raise ConfigurationError(f"material sized for {material.length} pixels, image has {length}")
    if material.modulus != spec.modulus:
        raise ConfigurationError(f"material modulus {material.modulus} != spec modulus {spec.modulus}")


def encrypt_round(spec: CipherSpec, key: RoundKey, pixels: np.ndarray, dims):
    perm, out_dims = round_permutation(spec, key, dims)
    G = spec.modulus
    if spec.order is Order.PERMUTE_THEN_SUBSTITUTE:
        out = encrypt_pixels(spec.variant, apply_pixels(perm, pixels), key.mask, G)
    else:
        out = apply_pixels(perm, encrypt_pixels(spec.variant, pixels, key.mask, G))
    return out, out_dims


def decrypt_round(spec: CipherSpec, key: RoundKey, pixels: np.ndarray, in_dims):
    """Undo one round; ``in_dims`` are the dims the round was entered with."""
    perm, _ = round_permutation(spec, key, in_dims)
    back = invert(perm)
    G = spec.modulus
    if spec.order is Order.PERMUTE_THEN_SUBSTITUTE:
        return apply_pixels(back, decrypt_pixels(spec.variant, pixels, key.mask, G))
    return decrypt_pixels(spec.variant, apply_pixels(back, pixels), key.mask, G)


def round_dims(spec: CipherSpec, working_dims: tuple[int, int]) -> list[tuple[int, int]]:
    """Dims entering each round, followed by the output dims."""
    dims = [tuple(working_dims)]
    for _ in range(spec.rounds):
        h, w = dims[-1]
        dims.append((w, h) if spec.rotation else (h, w))
    return dims


def encrypt_working(spec: CipherSpec, material: RoundMaterial, pixels: np.ndarray,
                    dims: tuple[int, int]) -> tuple[np.ndarray, tuple[int, int]]:
    """Run all rounds on working-domain pixels (batched on leading axes)."""
    _check_material(spec, material, pixels.shape[-1])
    x = pixels
    for i in range(spec.rounds):
        x, dims = encrypt_round(spec, material[i], x, dims)
    return x, dims


def decrypt_working(spec: CipherSpec, material: RoundMaterial, pixels: np.ndarray,
                    cipher_dims: tuple[int, int]) -> tuple[np.ndarray, tuple[int, int]]:
    """Inverse of :func:`encrypt_working`; returns working pixels and dims."""
    _check_material(spec, material, pixels.shape[-1])
    h, w = cipher_dims
    start = (w, h) if spec.rotation and spec.rounds % 2 else (h, w)
    path = round_dims(spec, start)
    x = pixels
    for i in reversed(range(spec.rounds)):
        x = decrypt_round(spec, material[i], x, path[i])
    return x, start


def frame_size(height: int, width: int) -> int:
    return 2 * height + 2 * width + 4


def _frame_mask(height: int, width: int) -> np.ndarray:
    mask = np.ones((height + 2, width + 2), dtype=bool)
    mask[1:-1, 1:-1] = False
    return mask.reshape(-1)


def border_wrap(m: ModImage, randomness: Randomness) -> ModImage:
    """Paste a one-pixel frame of ``2H + 2W + 4`` residues around ``m``.

    ``randomness`` is a numpy Generator or an iterable of residues; frame
    pixels are filled in row-major scan order.
    """
    h, w = m.shape
    n = frame_size(h, w)
    if isinstance(randomness, np.random.Generator):
        frame = randomness.integers(0, m.modulus, size=n)
    else:
        it = iter(randomness)
        frame = []
        for _ in range(n):
            try:
                frame.append(next(it))
            except StopIteration:
                raise GenerationError("randomness exhausted while drawing the frame") from None
        frame = as_residues(frame, m.modulus)
    out = np.zeros((h + 2, w + 2), dtype=m.pixels.dtype)
    out[1:-1, 1:-1] = m.to_array()
    out.reshape(-1)[_frame_mask(h, w)] = frame
    return ModImage(out.reshape(-1), h + 2, w + 2, m.modulus)


def border_strip(mi: ModImage) -> ModImage:
    h, w = mi.shape
    if h < 3 or w < 3:
        raise DimensionError("need at least a 3x3 image to strip a border")
    return ModImage(mi.to_array()[1:-1, 1:-1].reshape(-1), h - 2, w - 2, mi.modulus)


def frame_pixels(mi: ModImage) -> np.ndarray:
    return mi.pixels[_frame_mask(mi.height - 2, mi.width - 2)]


def encrypt(spec: CipherSpec, material: RoundMaterial, m: ModImage,
            rng: Randomness | None = None) -> ModImage:
    """Encrypt ``m``.  Border presets draw a fresh frame from ``rng``
    (default: a new OS-seeded generator)."""
    if m.modulus != spec.modulus:
        raise DimensionError(f"image modulus {m.modulus} != spec modulus {spec.modulus}")
    if spec.border_insertion:
        m = border_wrap(m, np.random.default_rng() if rng is None else rng)
    out, (h, w) = encrypt_working(spec, material, m.pixels, m.shape)
    return ModImage(out, h, w, spec.modulus)


def decrypt(spec: CipherSpec, material: RoundMaterial, c: ModImage) -> ModImage:
    if c.modulus != spec.modulus:
        raise DimensionError(f"ciphertext modulus {c.modulus} != spec modulus {spec.modulus}")
    out, (h, w) = decrypt_working(spec, material, c.pixels, c.shape)
    mi = ModImage(out, h, w, spec.modulus)
    return border_strip(mi) if spec.border_insertion else mi


def decrypt_batch(spec: CipherSpec, material: RoundMaterial, ciphertexts: np.ndarray,
                  cipher_dims: tuple[int, int]) -> np.ndarray:
    """Decrypt an ``(n, LL)`` stack of ciphertexts to an ``(n, L)`` stack."""
    out, (h, w) = decrypt_working(spec, material, np.asarray(ciphertexts), cipher_dims)
    if spec.border_insertion:
        out = out.reshape(-1, h, w)[:, 1:-1, 1:-1].reshape(out.shape[0], -1)
    return out
