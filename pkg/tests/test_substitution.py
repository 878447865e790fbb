import itertools

import numpy as np
import pytest

from modattack.algebra import ModImage
from modattack.errors import DimensionError, DomainError, ValidationError
from modattack.substitution import (
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
    fib_mod,
    fibonacci_closed_form,
    fibonacci_closed_form_pixels,
    sub_decrypt,
    sub_encrypt,
)

MODULAR = [MOD_ADD, MOD_ADD_CHAIN1, MOD_ADD_CHAIN2, MOD_SUB, FILTERING,
           SubstitutionVariant(Tag.FILTERING, ((-1, 3), (-3, 2), (-4, 1)))]
ALL = MODULAR + [XOR_CONTROL]


def literal_encrypt(variant, m, k, G):
    """Formulas written out with 1-based positions, one pixel at a time."""
    L = len(m)
    m = [None] + list(m)
    k = [None] + list(k)
    c = [0] * (L + 1)
    for i in range(1, L + 1):
        if variant.tag is Tag.MOD_ADD:
            c[i] = (m[i] + k[i]) % G
        elif variant.tag is Tag.MOD_SUB:
            c[i] = (k[i] - m[i]) % G
        elif variant.tag is Tag.MOD_ADD_CHAIN1:
            prev = m[L] if i == 1 else c[i - 1]
            c[i] = (m[i] + k[i] + prev) % G
        elif variant.tag is Tag.MOD_ADD_CHAIN2:
            if i == 1:
                c[i] = (m[1] + k[1] + m[L] + m[L - 1]) % G
            elif i == 2:
                c[i] = (m[2] + k[2] + c[1] + m[L]) % G
            else:
                c[i] = (m[i] + k[i] + c[i - 1] + c[i - 2]) % G
        elif variant.tag is Tag.FILTERING:
            acc = m[i] + k[i]
            for off, coeff in variant.kernel:
                if i + off >= 1:
                    acc += coeff * c[i + off]
            c[i] = acc % G
        elif variant.tag is Tag.XOR_CONTROL:
            c[i] = m[i] ^ k[i] ^ (c[i - 1] if i > 1 else 0)
    return c[1:]


def fib_big(i):
    a, b = 1, 1
    for _ in range(i - 1):
        a, b = b, a + b
    return a


def img(values, G=256):
    return ModImage.vector(values, G)


@pytest.mark.parametrize("variant", ALL, ids=str)
@pytest.mark.parametrize("G", [4, 256, 65536])
def test_matches_literal_formula(rng, variant, G):
    for L in (3, 4, 9, 17):
        for _ in range(20):
            m = rng.integers(0, G, L)
            k = rng.integers(0, G, L)
            assert encrypt_pixels(variant, m, k, G).tolist() == literal_encrypt(variant, m.tolist(), k.tolist(), G)


@pytest.mark.parametrize("variant", ALL, ids=str)
@pytest.mark.parametrize("G", [4, 256, 65536])
def test_round_trip_1000(rng, variant, G):
    m = rng.integers(0, G, (1000, 12))
    k = rng.integers(0, G, 12)
    c = encrypt_pixels(variant, m, k, G)
    assert np.array_equal(decrypt_pixels(variant, c, k, G), m)


def test_trivial_examples():
    K = img([9, 8, 7, 6])
    Z = ModImage.zeros(1, 4, 256)
    assert sub_encrypt(MOD_ADD, Z, K) == K
    assert sub_encrypt(MOD_SUB, K, K) == Z
    assert sub_decrypt(MOD_ADD, K, K) == Z


def test_chain1_two_pixels_by_hand():
    G = 256
    for m1, m2, k1, k2 in [(10, 20, 30, 40), (255, 1, 128, 77), (0, 0, 5, 250)]:
        c1 = (m1 + k1 + m2) % G
        c2 = (m2 + k2 + c1) % G
        assert sub_encrypt(MOD_ADD_CHAIN1, img([m1, m2]), img([k1, k2])).tolist() == [c1, c2]
        p2 = (c2 - k2 - c1) % G
        p1 = (c1 - k1 - p2) % G
        assert (p1, p2) == (m1, m2)
        assert sub_decrypt(MOD_ADD_CHAIN1, img([c1, c2]), img([k1, k2])).tolist() == [m1, m2]


def test_length_errors():
    with pytest.raises(DomainError):
        sub_encrypt(MOD_ADD_CHAIN2, img([1]), img([1]))
    with pytest.raises(DomainError):
        sub_decrypt(MOD_ADD_CHAIN2, img([1, 2]), img([1, 2]))
    with pytest.raises(DomainError):
        sub_encrypt(MOD_ADD_CHAIN1, img([1]), img([1]))
    with pytest.raises(DimensionError):
        sub_encrypt(MOD_ADD, img([1, 2]), img([1, 2, 3]))
    with pytest.raises(DomainError):
        sub_encrypt(XOR_CONTROL, img([1, 2], 10), img([1, 2], 10))


def test_kernel_validation():
    assert FILTERING.kernel == ((-1, 1), (-2, 1))
    assert SubstitutionVariant(Tag.FILTERING, ((0, 1), (-1, 2))).kernel == ((-1, 2),)
    with pytest.raises(ValidationError):
        SubstitutionVariant(Tag.FILTERING, ((0, 3), (-1, 1)))
    with pytest.raises(ValidationError):
        SubstitutionVariant(Tag.FILTERING, ((1, 1),))
    with pytest.raises(ValidationError):
        SubstitutionVariant(Tag.MOD_ADD, ((-1, 1),))


def test_fib_mod():
    assert fib_mod(1, 256) == 1 and fib_mod(2, 256) == 1
    assert fib_mod(10, 256) == fib_big(10) % 256 == 55
    assert fib_big(14) == 377
    assert fib_mod(14, 4) == 377 % 4 == 1
    for i in range(1, 60):
        assert fib_mod(i, 1000) == fib_big(i) % 1000
    with pytest.raises(DomainError):
        fib_mod(0, 4)


def test_closed_form_first_pixel_and_zeros():
    G = 256
    m, k = img([3, 5, 7, 11, 13]), img([2, 4, 6, 8, 10])
    d = fibonacci_closed_form(m, k)
    assert d.tolist()[0] == (3 + 2 + 13 + 11) % G
    Z = ModImage.zeros(1, 5, G)
    assert fibonacci_closed_form(Z, Z) == Z
    with pytest.raises(DomainError):
        fibonacci_closed_form(img([1]), img([1]))


def test_closed_form_exhaustive_masks_g4(rng):
    G = 4
    for L in range(2, 7):
        masks = np.array(list(itertools.product(range(G), repeat=L)))
        for _ in range(4):
            m = rng.integers(0, G, L)
            batch_m = np.broadcast_to(m, masks.shape)
            seq = np.array([literal_encrypt(MOD_ADD_CHAIN2, m.tolist(), k.tolist(), G) for k in masks])
            assert np.array_equal(encrypt_pixels(MOD_ADD_CHAIN2, batch_m, masks, G), seq)
            assert np.array_equal(fibonacci_closed_form_pixels(batch_m, masks, G), seq)


@pytest.mark.parametrize("L", [9, 64])
def test_closed_form_random_g256(rng, L):
    G = 256
    for _ in range(200):
        m, k = rng.integers(0, G, L), rng.integers(0, G, L)
        assert fibonacci_closed_form_pixels(m, k, G).tolist() == literal_encrypt(MOD_ADD_CHAIN2, m.tolist(), k.tolist(), G)


def differential_map(variant, delta, G):
    zeros = np.zeros_like(delta)
    return (encrypt_pixels(variant, delta, zeros, G) - encrypt_pixels(variant, zeros, zeros, G)) % G


@pytest.mark.parametrize("variant", MODULAR, ids=str)
def test_differential_linearity_sampled(rng, variant):
    G, L = 256, 10
    m1 = rng.integers(0, G, (1000, L))
    m2 = rng.integers(0, G, (1000, L))
    ka, kb = rng.integers(0, G, L), rng.integers(0, G, L)
    da = (encrypt_pixels(variant, m1, ka, G) - encrypt_pixels(variant, m2, ka, G)) % G
    db = (encrypt_pixels(variant, m1, kb, G) - encrypt_pixels(variant, m2, kb, G)) % G
    assert np.array_equal(da, db)
    assert np.array_equal(da, differential_map(variant, (m1 - m2) % G, G))


@pytest.mark.parametrize("variant", MODULAR, ids=str)
def test_differential_linearity_exhaustive_l3_g4(variant):
    G = 4
    space = np.array(list(itertools.product(range(G), repeat=3)))
    pairs = np.array(list(itertools.product(range(len(space)), repeat=2)))
    m1, m2 = space[pairs[:, 0]], space[pairs[:, 1]]
    expected = differential_map(variant, (m1 - m2) % G, G)
    for k in space:
        got = (encrypt_pixels(variant, m1, k, G) - encrypt_pixels(variant, m2, k, G)) % G
        assert np.array_equal(got, expected)
    for lam in range(G):
        assert np.array_equal(differential_map(variant, (lam * space) % G, G),
                              (lam * differential_map(variant, space, G)) % G)


def test_mod_sub_differential_is_negation(rng):
    G = 256
    delta = rng.integers(0, G, (200, 7))
    assert np.array_equal(differential_map(MOD_SUB, delta, G), (-delta) % G)


def test_xor_breaks_additivity(rng):
    G, L = 256, 8
    k = rng.integers(0, G, L)
    base = rng.integers(0, G, L)

    def H(delta):
        return (encrypt_pixels(XOR_CONTROL, (base + delta) % G, k, G) - encrypt_pixels(XOR_CONTROL, base, k, G)) % G

    found = False
    for _ in range(100):
        d1, d2 = rng.integers(0, G, L), rng.integers(0, G, L)
        if not np.array_equal(H((d1 + d2) % G), (H(d1) + H(d2)) % G):
            found = True
            break
    assert found
