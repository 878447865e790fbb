import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modattack.algebra import ModImage
from modattack.cipher import (
    MODULAR_PRESETS,
    PRESET_NAMES,
    CipherSpec,
    Order,
    border_strip,
    border_wrap,
    decrypt,
    encrypt,
    frame_pixels,
    frame_size,
    keygen,
    preset,
)
from modattack.errors import ConfigurationError, DimensionError, PresetNotFound
from modattack.keyschedule import RoundKey, RoundMaterial
from modattack.permutation import Permutation, apply, invert, rotation90, transpose
from modattack.substitution import MOD_ADD, MOD_ADD_CHAIN1, MOD_ADD_CHAIN2, Tag, sub_decrypt, sub_encrypt

from conftest import random_image


def test_preset_table():
    expect = {
        "basic": (Tag.MOD_ADD, Order.PERMUTE_THEN_SUBSTITUTE, 2, False),
        "lan": (Tag.MOD_SUB, Order.SUBSTITUTE_THEN_PERMUTE, 4, False),
        "zhou": (Tag.MOD_ADD_CHAIN2, Order.SUBSTITUTE_THEN_PERMUTE, 2, False),
        "hua_ma": (Tag.MOD_ADD_CHAIN1, Order.PERMUTE_THEN_SUBSTITUTE, 2, True),
        "borujeni": (Tag.MOD_ADD, Order.PERMUTE_THEN_SUBSTITUTE, 1, False),
        "hua2018": (Tag.MOD_ADD_CHAIN2, Order.PERMUTE_THEN_SUBSTITUTE, 4, False),
        "hua2015": (Tag.MOD_ADD_CHAIN1, Order.PERMUTE_THEN_SUBSTITUTE, 2, False),
        "cosine": (Tag.MOD_ADD_CHAIN1, Order.PERMUTE_THEN_SUBSTITUTE, 4, False),
        "filtering": (Tag.FILTERING, Order.PERMUTE_THEN_SUBSTITUTE, 2, False),
        "filtering_border": (Tag.FILTERING, Order.PERMUTE_THEN_SUBSTITUTE, 4, True),
        "xor_control": (Tag.XOR_CONTROL, Order.PERMUTE_THEN_SUBSTITUTE, 2, False),
    }
    assert set(PRESET_NAMES) == set(expect)
    assert "xor_control" not in MODULAR_PRESETS and len(MODULAR_PRESETS) == 10
    for name, (tag, order, rounds, border) in expect.items():
        s = preset(name)
        assert (s.variant.tag, s.order, s.rounds, s.border_insertion) == (tag, order, rounds, border)
    assert preset("zhou", rounds=8).rounds == 8
    with pytest.raises(PresetNotFound):
        preset("nope")
    with pytest.raises(ConfigurationError):
        preset("basic", kernel=[(-1, 1)])
    with pytest.raises(ConfigurationError):
        CipherSpec(MOD_ADD, rounds=0)


@pytest.mark.parametrize("name", PRESET_NAMES)
@pytest.mark.parametrize("G,h,w", [(256, 5, 7), (65536, 4, 4), (4, 3, 3)])
def test_round_trip(rng, name, G, h, w):
    spec = preset(name, modulus=G)
    mat = keygen(spec, "c0ffee", h, w)
    for _ in range(5):
        m = random_image(rng, h, w, G)
        c = encrypt(spec, mat, m, rng=rng)
        assert c.shape == spec.ciphertext_dims(h, w)
        assert decrypt(spec, mat, c) == m


def test_rotation_dims():
    spec = preset("hua2015", rounds=3)
    assert spec.ciphertext_dims(4, 6) == (6, 4)
    assert spec.plaintext_dims(6, 4) == (4, 6)
    assert preset("hua_ma").ciphertext_dims(4, 6) == (6, 8)


def test_border_wrap_and_strip(rng):
    m = ModImage.from_array(np.arange(6).reshape(2, 3), 256)
    frame = list(range(100, 100 + frame_size(2, 3)))
    mi = border_wrap(m, frame)
    assert mi.shape == (4, 5)
    expected = np.array([
        [100, 101, 102, 103, 104],
        [105, 0, 1, 2, 106],
        [107, 3, 4, 5, 108],
        [109, 110, 111, 112, 113],
    ])
    assert np.array_equal(mi.to_array(), expected)
    assert frame_pixels(mi).tolist() == frame
    assert border_strip(mi) == m
    assert frame_size(2, 3) == 14
    with pytest.raises(DimensionError):
        border_strip(ModImage.zeros(2, 5, 256))


def test_border_frames_are_fresh(rng):
    spec = preset("hua_ma")
    mat = keygen(spec, "01", 4, 4)
    m = random_image(rng, 4, 4, 256)
    c1, c2 = encrypt(spec, mat, m, rng=rng), encrypt(spec, mat, m, rng=rng)
    assert c1 != c2
    assert decrypt(spec, mat, c1) == decrypt(spec, mat, c2) == m


def hand_material(perms, masks, G):
    keys = tuple(RoundKey(Permutation.from_one_based(p), np.array(k)) for p, k in zip(perms, masks))
    return RoundMaterial(keys, len(perms[0]), G)


def test_two_round_by_hand():
    G = 256
    perms = [[3, 1, 4, 2], [2, 4, 1, 3]]
    masks = [[10, 20, 30, 40], [5, 6, 7, 8]]
    mat = hand_material(perms, masks, G)
    spec = CipherSpec(MOD_ADD, rounds=2, modulus=G)
    m = [1, 2, 3, 4]
    x = [m[i - 1] for i in perms[0]]
    x = [(a + b) % G for a, b in zip(x, masks[0])]
    x = [x[i - 1] for i in perms[1]]
    x = [(a + b) % G for a, b in zip(x, masks[1])]
    assert encrypt(spec, mat, ModImage.vector(m, G)).tolist() == x

    stp = CipherSpec(MOD_ADD, order=Order.SUBSTITUTE_THEN_PERMUTE, rounds=1, modulus=G)
    y = [(a + b) % G for a, b in zip(m, masks[0])]
    y = [y[i - 1] for i in perms[0]]
    assert encrypt(stp, mat, ModImage.vector(m, G)).tolist() == y


def test_single_round_decrypt_is_unmask_then_unpermute(rng):
    G = 256
    spec = preset("borujeni")
    mat = keygen(spec, "aa", 4, 4)
    c = random_image(rng, 4, 4, G)
    k = mat[0].mask_image(4, 4, G)
    expected = apply(invert(mat[0].permutation), sub_decrypt(MOD_ADD, c, k))
    assert decrypt(spec, mat, c) == expected


def test_rotation_and_column_scan_by_hand(rng):
    G, h, w = 256, 3, 4
    m = random_image(rng, h, w, G)
    spec = CipherSpec(MOD_ADD_CHAIN1, rounds=1, rotation=True, modulus=G)
    mat = keygen(spec, "bb", h, w)
    key = mat[0]
    permuted = apply(key.permutation, m).to_array()
    rotated = np.rot90(permuted, -1)
    expected = sub_encrypt(MOD_ADD_CHAIN1, ModImage.from_array(rotated, G),
                           ModImage(key.mask, w, h, G))
    assert encrypt(spec, mat, m) == expected

    spec = CipherSpec(MOD_ADD_CHAIN1, rounds=1, column_scan=True, modulus=G)
    mat = keygen(spec, "bb", h, w)
    key = mat[0]
    columns = apply(key.permutation, m).to_array().T.reshape(-1)
    sub = sub_encrypt(MOD_ADD_CHAIN1, ModImage.vector(columns, G), ModImage.vector(key.mask, G))
    out = encrypt(spec, mat, m)
    assert out.shape == (h, w)
    assert out.tolist() == sub.tolist()


def test_framed_differential_projects_to_plaintext(rng):
    # decrypting a framed image differential and dropping the frame gives the
    # plaintext differential
    spec = preset("filtering_border")
    G, h, w = 256, 4, 5
    mat = keygen(spec, "cd", h, w)
    m1, m2 = random_image(rng, h, w, G), random_image(rng, h, w, G)
    c1, c2 = encrypt(spec, mat, m1, rng=rng), encrypt(spec, mat, m2, rng=rng)
    dm = (decrypt(spec, mat, c1).pixels - decrypt(spec, mat, c2).pixels) % G
    assert np.array_equal(dm, (m1.pixels - m2.pixels) % G)


def test_material_mismatch():
    spec = preset("basic")
    mat = keygen(spec, "00", 4, 4)
    with pytest.raises(ConfigurationError):
        encrypt(spec, mat, ModImage.zeros(3, 3, 256))
    with pytest.raises(ConfigurationError):
        encrypt(spec.with_rounds(3), mat, ModImage.zeros(4, 4, 256))
    with pytest.raises(DimensionError):
        encrypt(spec, mat, ModImage.zeros(4, 4, 16))


@settings(max_examples=40, deadline=None)
@given(
    name=st.sampled_from(PRESET_NAMES),
    h=st.integers(2, 6),
    w=st.integers(2, 6),
    seed=st.binary(min_size=1, max_size=8),
    data=st.data(),
)
def test_round_trip_property(name, h, w, seed, data):
    spec = preset(name)
    mat = keygen(spec, seed, h, w, generator="counter")
    px = data.draw(st.lists(st.integers(0, 255), min_size=h * w, max_size=h * w))
    m = ModImage(np.array(px), h, w, 256)
    c = encrypt(spec, mat, m, rng=np.random.default_rng(0))
    assert decrypt(spec, mat, c) == m
