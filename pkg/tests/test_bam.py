import numpy as np
import pytest

from modattack.bam import (
    DtfProbe,
    all_differentials,
    bam_suite,
    check_additivity,
    check_bijectivity,
    check_cdtf_composition,
    check_injectivity_sampled,
    check_multiplicability,
    eval_dtf,
)
from modattack.algebra import ModImage
from modattack.cipher import MODULAR_PRESETS, keygen, preset
from modattack.errors import NotADTFError, ScaleError
from modattack.keyschedule import derive_round_material, make_stream


def probe_for(name, G=4, seed="0b"):
    """Keyed preset probed on a 1x3 working image (framed presets included)."""
    spec = preset(name, modulus=G)
    mat = derive_round_material(make_stream(seed), spec.rounds, 3, G)
    return spec, mat, (1, 3)


def test_all_differentials_order():
    d = all_differentials(2, 3)
    assert d.shape == (9, 2)
    assert d[1].tolist() == [1, 0] and d[3].tolist() == [0, 1]
    with pytest.raises(ScaleError):
        all_differentials(17, 2)


@pytest.mark.parametrize("name", MODULAR_PRESETS)
def test_modular_presets_pass(name):
    spec, mat, dims = probe_for(name)
    probe = DtfProbe(spec, mat, dims)
    b = check_bijectivity(probe)
    assert b.passed and b.cases == 64 and b.note.startswith("64/64")
    a = check_additivity(probe)
    assert a.passed and a.mode == "exhaustive" and a.cases == 64 * 64
    m = check_multiplicability(probe)
    assert m.passed and m.mode == "exhaustive"
    assert check_cdtf_composition(spec, mat, dims).passed


def test_xor_control_counterexample():
    spec, mat, dims = probe_for("xor_control")
    probe = DtfProbe(spec, mat, dims, bases=[ModImage.zeros(1, 3, 4)])
    v = check_additivity(probe)
    assert v.passed is False
    ce = v.counterexample
    lhs = probe.response((np.array(ce["delta1"]) + ce["delta2"]) % 4)
    rhs = (probe.response(np.array(ce["delta1"])) + probe.response(np.array(ce["delta2"]))) % 4
    assert not np.array_equal(lhs, rhs)


def test_xor_control_depends_on_base():
    spec = preset("xor_control")
    mat = keygen(spec, "0c", 4, 4)
    probe = DtfProbe(spec, mat, (4, 4), seed=1)
    with pytest.raises(NotADTFError):
        probe.responses(np.random.default_rng(0).integers(0, 256, (50, 16)))
    verdicts = {v.check: v for v in bam_suite(spec, mat, (4, 4), trials=100)}
    assert verdicts["base_independence"].passed is False


def test_zhou_and_lan_suite_at_byte_scale():
    for name in ("zhou", "lan"):
        spec = preset(name)
        mat = keygen(spec, "0d", 4, 4)
        verdicts = bam_suite(spec, mat, (4, 4), trials=200, seed=3)
        assert all(v.passed is not False for v in verdicts)
        inj = [v for v in verdicts if v.check == "injectivity"][0]
        assert inj.passed is None and inj.mode == "sampled" and inj.seed == 3


def test_sampled_verdicts_are_replayable():
    spec = preset("xor_control")
    mat = keygen(spec, "0e", 3, 3)
    probe = DtfProbe(spec, mat, (3, 3))
    a = check_additivity(probe, trials=50, seed=9)
    b = check_additivity(probe, trials=50, seed=9)
    assert a.to_record() == b.to_record()
    assert check_injectivity_sampled(probe, 100, 1).cases <= 100


def test_eval_dtf_on_mod_sub_is_permuted_negation():
    spec = preset("lan", rounds=1)
    mat = keygen(spec, "0f", 1, 5)
    probe = DtfProbe(spec, mat, (1, 5))
    d = ModImage.vector([1, 2, 3, 4, 5], 256)
    out = eval_dtf(probe, d)
    neg = [(-v) % 256 for v in d.tolist()]
    assert out.tolist() == [neg[i] for i in mat[0].permutation.source.tolist()]
