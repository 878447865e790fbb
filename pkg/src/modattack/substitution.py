"""Substitution passes of the attacked cipher family, plus an XOR control.

All array-level functions act on the last axis of ``(..., L)`` integer
arrays so that many images can be processed in one call.  Pixel position
``i`` in the formulas below is 0-based: the "previous cipher pixel" of
position ``i`` is position ``i - 1`` and the chain wraps to the plaintext
tail (``m[L-1]``, ``m[L-2]``) at the start.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import ModImage, residue_dtype
from .errors import DimensionError, DomainError, ValidationError


class Tag(str, Enum):
    MOD_ADD = "mod_add"
    MOD_ADD_CHAIN1 = "mod_add_chain1"
    MOD_ADD_CHAIN2 = "mod_add_chain2"
    MOD_SUB = "mod_sub"
    FILTERING = "filtering"
    XOR_CONTROL = "xor_control"


DEFAULT_KERNEL = ((-1, 1), (-2, 1))


@dataclass(frozen=True)
class SubstitutionVariant:
    """One substitution rule.

    ``kernel`` only matters for :attr:`Tag.FILTERING`: ``(offset, coeff)``
    pairs with negative offsets naming earlier cipher pixels.  The current
    pixel's coefficient is fixed to 1; a ``(0, 1)`` entry is accepted and
    dropped, any other zero-offset coefficient is rejected.
    """

    tag: Tag
    kernel: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tag", Tag(self.tag))
        if self.tag is not Tag.FILTERING:
            if self.kernel:
                raise ValidationError("only the filtering variant takes a kernel")
            return
        kernel = DEFAULT_KERNEL if not self.kernel else tuple(self.kernel)
        taps = []
        for offset, coeff in kernel:
            offset, coeff = int(offset), int(coeff)
            if offset == 0:
                if coeff != 1:
                    raise ValidationError("current-pixel coefficient must be 1")
                continue
            if offset > 0:
                raise ValidationError("filtering taps must look backwards (negative offsets)")
            taps.append((offset, coeff))
        if len({o for o, _ in taps}) != len(taps):
            raise ValidationError("duplicate kernel offset")
        object.__setattr__(self, "kernel", tuple(sorted(taps, reverse=True)))

    @property
    def is_modular(self) -> bool:
        return self.tag is not Tag.XOR_CONTROL

    def __str__(self):
        if self.tag is Tag.FILTERING:
            return f"filtering{list(self.kernel)}"
        return self.tag.value


MOD_ADD = SubstitutionVariant(Tag.MOD_ADD)
MOD_ADD_CHAIN1 = SubstitutionVariant(Tag.MOD_ADD_CHAIN1)
MOD_ADD_CHAIN2 = SubstitutionVariant(Tag.MOD_ADD_CHAIN2)
MOD_SUB = SubstitutionVariant(Tag.MOD_SUB)
FILTERING = SubstitutionVariant(Tag.FILTERING)
XOR_CONTROL = SubstitutionVariant(Tag.XOR_CONTROL)


def _check_length(variant: SubstitutionVariant, length: int, decrypting: bool) -> None:
    if variant.tag is Tag.MOD_ADD_CHAIN1 and length < 2:
        raise DomainError("mod_add_chain1 needs at least 2 pixels")
    if variant.tag is Tag.MOD_ADD_CHAIN2:
        if length < 2:
            raise DomainError("mod_add_chain2 needs at least 2 pixels")
        if decrypting and length < 3:
            # with L == 2 the first two outputs only pin down 2*m[1]
            raise DomainError("mod_add_chain2 is only invertible for L >= 3")


def _check_xor_modulus(modulus: int) -> None:
    if modulus & (modulus - 1):
        raise DomainError("the XOR control needs a power-of-two modulus")


def encrypt_pixels(variant: SubstitutionVariant, m: np.ndarray, k: np.ndarray, modulus: int) -> np.ndarray:
    """Substitute plaintext pixels ``m`` with mask ``k`` (last axis is L)."""
    if m.shape[-1] != k.shape[-1]:
        raise DimensionError("plaintext and mask differ in length")
    length = m.shape[-1]
    _check_length(variant, length, decrypting=False)
    G = modulus
    tag = variant.tag
    s = (m + k) % G

    if tag is Tag.MOD_ADD:
        return s
    if tag is Tag.MOD_SUB:
        return (k - m) % G
    if tag is Tag.MOD_ADD_CHAIN1:
        # c[i] = m[L-1] + sum_{j<=i} (m[j] + k[j])
        return (np.cumsum(s, axis=-1) % G + m[..., -1:]) % G
    if tag is Tag.XOR_CONTROL:
        _check_xor_modulus(G)
        return np.bitwise_xor.accumulate(np.bitwise_xor(m, k), axis=-1)

    c = np.empty_like(s)
    if tag is Tag.MOD_ADD_CHAIN2:
        c[..., 0] = (s[..., 0] + m[..., -1] + m[..., -2]) % G
        c[..., 1] = (s[..., 1] + c[..., 0] + m[..., -1]) % G
        for i in range(2, length):
            c[..., i] = (s[..., i] + c[..., i - 1] + c[..., i - 2]) % G
        return c
    if tag is Tag.FILTERING:
        for i in range(length):
            acc = s[..., i]
            for offset, coeff in variant.kernel:
                if i + offset >= 0:
                    acc = acc + coeff * c[..., i + offset]
            c[..., i] = acc % G
        return c
    raise DomainError(f"unknown substitution variant {variant}")


def decrypt_pixels(variant: SubstitutionVariant, c: np.ndarray, k: np.ndarray, modulus: int) -> np.ndarray:
    """Invert :func:`encrypt_pixels` (vectorised; no sequential loop)."""
    if c.shape[-1] != k.shape[-1]:
        raise DimensionError("ciphertext and mask differ in length")
    length = c.shape[-1]
    _check_length(variant, length, decrypting=True)
    G = modulus
    tag = variant.tag

    if tag is Tag.MOD_ADD:
        return (c - k) % G
    if tag is Tag.MOD_SUB:
        return (k - c) % G
    if tag is Tag.XOR_CONTROL:
        _check_xor_modulus(G)
        prev = np.zeros_like(c)
        prev[..., 1:] = c[..., :-1]
        return c ^ k ^ prev

    m = np.empty_like(c)
    if tag is Tag.MOD_ADD_CHAIN1:
        m[..., 1:] = (c[..., 1:] - k[..., 1:] - c[..., :-1]) % G
        m[..., 0] = (c[..., 0] - k[..., 0] - m[..., -1]) % G
        return m
    if tag is Tag.MOD_ADD_CHAIN2:
        m[..., 2:] = (c[..., 2:] - k[..., 2:] - c[..., 1:-1] - c[..., :-2]) % G
        m[..., 1] = (c[..., 1] - k[..., 1] - c[..., 0] - m[..., -1]) % G
        m[..., 0] = (c[..., 0] - k[..., 0] - m[..., -1] - m[..., -2]) % G
        return m
    if tag is Tag.FILTERING:
        acc = c - k
        for offset, coeff in variant.kernel:
            if -offset < length:
                acc[..., -offset:] -= coeff * c[..., :offset]
        return acc % G
    raise DomainError(f"unknown substitution variant {variant}")


def _pair(m: ModImage, k: ModImage) -> None:
    if m.modulus != k.modulus or len(m) != len(k):
        raise DimensionError("image and mask must share length and modulus")


def sub_encrypt(variant: SubstitutionVariant, m: ModImage, k: ModImage) -> ModImage:
    _pair(m, k)
    return m.with_pixels(encrypt_pixels(variant, m.pixels.copy(), k.pixels, m.modulus))


def sub_decrypt(variant: SubstitutionVariant, c: ModImage, k: ModImage) -> ModImage:
    _pair(c, k)
    return c.with_pixels(decrypt_pixels(variant, c.pixels.copy(), k.pixels, c.modulus))


def fib_mod(i: int, modulus: int) -> int:
    """``Fib(i) mod modulus`` with ``Fib(1) = Fib(2) = 1``."""
    if i < 1:
        raise DomainError("Fibonacci index starts at 1")
    a, b = 1, 1
    for _ in range(i - 1):
        a, b = b, (a + b) % modulus
    return a % modulus


def fib_table(n: int, modulus: int) -> np.ndarray:
    """Array whose entry ``i`` is ``Fib(i) mod modulus`` for ``0 <= i <= n``."""
    out = np.zeros(n + 1, dtype=residue_dtype(modulus))
    if n >= 1:
        out[1] = 1 % modulus
    for i in range(2, n + 1):
        out[i] = (out[i - 1] + out[i - 2]) % modulus
    return out


def fibonacci_closed_form_pixels(m: np.ndarray, k: np.ndarray, modulus: int) -> np.ndarray:
    """Non-recursive form of the two-pixel chain.

    With 1-based position ``i``:
    ``d(i) = sum_{j<=i} Fib(i-j+1)(m(j)+k(j)) + Fib(i+1) m(L) + Fib(i) m(L-1)``.
    """
    length = m.shape[-1]
    if length < 2:
        raise DomainError("the closed form needs at least 2 pixels")
    G = modulus
    fib = fib_table(length + 1, G)
    i = np.arange(1, length + 1)
    lag = i[:, None] - i[None, :] + 1          # Fib index for (row i, col j)
    weights = np.where(lag >= 1, fib[np.clip(lag, 0, None)], 0)
    dtype = residue_dtype(G)
    if dtype is not object and length * (G - 1) ** 2 >= 2**63:
        dtype = object
    s = ((m + k) % G).astype(dtype)
    d = (s @ weights.T.astype(dtype)) % G
    d = d + fib[i + 1] * m[..., -1:] % G + fib[i] * m[..., -2:-1] % G
    return d % G


def fibonacci_closed_form(m: ModImage, k: ModImage) -> ModImage:
    _pair(m, k)
    return m.with_pixels(fibonacci_closed_form_pixels(m.pixels, k.pixels, m.modulus))
