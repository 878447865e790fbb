import hashlib
import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modattack.errors import GenerationError, SeedError
from modattack.keyschedule import (
    BURN_IN,
    Keystream,
    counter_stream,
    decode_seed,
    derive_round_material,
    logistic_sine_params,
    logistic_sine_stream,
    make_stream,
)


class Finite(Keystream):
    def __init__(self, values):
        super().__init__()
        self._it = iter(values)

    def _next(self):
        return next(self._it)


def take(stream, n):
    return [next(stream) for _ in range(n)]


@pytest.mark.parametrize("gen", ["logistic", "counter"])
def test_determinism_and_range(gen):
    a = take(make_stream("00ff", gen), 500)
    b = take(make_stream(b"\x00\xff", gen), 500)
    assert a == b
    assert all(0.0 <= u < 1.0 for u in a)
    assert a != take(make_stream("00fe", gen), 500)


def test_logistic_matches_plain_iteration():
    x0, r = logistic_sine_params("abcd")
    assert 0 < x0 < 1 and 1 <= r < 4
    x = x0
    for _ in range(BURN_IN):
        x = (r * x * (1 - x) + (4 - r) * math.sin(math.pi * x) / 4) % 1
    expected = []
    for _ in range(20):
        x = (r * x * (1 - x) + (4 - r) * math.sin(math.pi * x) / 4) % 1
        expected.append(x)
    assert take(logistic_sine_stream("abcd"), 20) == expected


def test_counter_block_layout():
    key = bytes.fromhex("0102")
    block = hashlib.sha256(key + (0).to_bytes(8, "big")).digest()
    words = struct.unpack(">4Q", block)
    expected = [(w >> 11) / 2**53 for w in words]
    s = counter_stream(key)
    assert take(s, 4) == expected
    block1 = hashlib.sha256(key + (1).to_bytes(8, "big")).digest()
    assert next(s) == (struct.unpack(">Q", block1[:8])[0] >> 11) / 2**53


def test_bad_seeds():
    for bad in ["zz", "", b""]:
        with pytest.raises(SeedError):
            decode_seed(bad)
    with pytest.raises(SeedError):
        make_stream("00", "mersenne")


@pytest.mark.parametrize("gen", ["logistic", "counter"])
@pytest.mark.parametrize("G", [4, 256, 65536])
def test_material_accounting_and_ranges(gen, G):
    s = make_stream("5eed", gen)
    mat = derive_round_material(s, 3, 50, G)
    assert s.draws_used == 3 * 2 * 50
    assert len(mat) == 3
    for key in mat.rounds:
        assert sorted(key.permutation.source.tolist()) == list(range(50))
        assert key.mask.min() >= 0 and key.mask.max() < G


def test_material_deterministic():
    a = derive_round_material(make_stream("01"), 2, 30, 256)
    b = derive_round_material(make_stream("01"), 2, 30, 256)
    for ka, kb in zip(a.rounds, b.rounds):
        assert ka.permutation == kb.permutation
        assert np.array_equal(ka.mask, kb.mask)


def test_exhausted_stream():
    with pytest.raises(GenerationError):
        derive_round_material(Finite([0.5] * 7), 1, 4, 256)


def test_residue_quantisation():
    s = Finite([0.0, 0.24999, 0.25, 0.999999])
    assert s.residues(4, 4).tolist() == [0, 0, 1, 3]


@settings(max_examples=50, deadline=None)
@given(st.binary(min_size=1, max_size=16))
def test_residues_in_range(seed):
    r = counter_stream(seed).residues(64, 7)
    assert r.min() >= 0 and r.max() < 7


def test_rounds_get_distinct_material():
    mat = derive_round_material(make_stream("0a0b"), 2, 64, 256)
    assert mat[0].permutation != mat[1].permutation
    assert not np.array_equal(mat[0].mask, mat[1].mask)
