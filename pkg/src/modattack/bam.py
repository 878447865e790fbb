"""Empirical checks of the differential transfer map of a cipher.

For a fixed key, the differential response of the permutation-substitution
network is ``H(d) = E(x + d) - E(x)``.  The attack works exactly when ``H``
does not depend on ``x`` and is bijective, additive and homogeneous
(``H(a*d) = a*H(d)``) modulo G.  The probes here evaluate ``H`` on the
working image, i.e. after any border has been pasted on, with the frame
treated as ordinary input pixels.

All randomised checks take an explicit ``seed`` so verdicts can be replayed.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import ModImage
from .cipher import CipherSpec, encrypt_round, encrypt_working, round_dims
from .errors import DimensionError, NotADTFError, ScaleError
from .keyschedule import RoundMaterial

EXHAUSTIVE_LIMIT = 2**16
# All-pairs additivity is only attempted up to this many differentials.
PAIRWISE_LIMIT = 256


@dataclass
class Verdict:
    """Outcome of one check.  ``passed`` is None when the check cannot certify."""

    check: str
    passed: Optional[bool]
    cases: int
    mode: str
    seed: Optional[int] = None
    counterexample: Optional[dict] = None
    note: str = ""
    preset: str = ""

    def to_record(self) -> dict:
        return asdict(self)


class DtfProbe:
    """Differential probe of a keyed cipher on ``dims``-shaped working images.

    ``bases`` are the reference images ``x``; by default the zero image and
    one random image drawn from ``seed``.
    """

    def __init__(self, spec: CipherSpec, material: RoundMaterial, dims: tuple[int, int],
                 bases: Sequence[ModImage] | None = None, seed: int = 0):
        self.spec = spec
        self.material = material
        self.dims = tuple(dims)
        self.length = dims[0] * dims[1]
        self.modulus = spec.modulus
        if bases is None:
            rng = np.random.default_rng(seed)
            bases = [
                np.zeros(self.length, dtype=np.int64),
                rng.integers(0, self.modulus, self.length),
            ]
        else:
            bases = [b.pixels for b in bases]
        if len(bases) < 1 or any(len(b) != self.length for b in bases):
            raise DimensionError("bases must match the probe dims")
        self.bases = [np.asarray(b, dtype=np.int64) for b in bases]
        self._base_out = [self._encrypt(b) for b in self.bases]

    def _encrypt(self, pixels):
        return encrypt_working(self.spec, self.material, pixels, self.dims)[0]

    def response(self, deltas: np.ndarray, base: int = 0) -> np.ndarray:
        """``H(d)`` against one base, for a ``(..., L)`` stack of differentials."""
        deltas = np.asarray(deltas, dtype=np.int64)
        x = (self.bases[base] + deltas) % self.modulus
        return (self._encrypt(x) - self._base_out[base]) % self.modulus

    def responses(self, deltas: np.ndarray) -> np.ndarray:
        """``H(d)`` against every base; raises :class:`NotADTFError` on disagreement."""
        first = self.response(deltas, 0)
        for b in range(1, len(self.bases)):
            other = self.response(deltas, b)
            bad = np.any(first != other, axis=-1)
            if np.any(bad):
                j = int(np.flatnonzero(np.atleast_1d(bad))[0])
                d = np.atleast_2d(deltas)[j]
                raise NotADTFError(
                    "differential response depends on the base image",
                    delta=d.tolist(),
                    responses=(np.atleast_2d(first)[j].tolist(), np.atleast_2d(other)[j].tolist()),
                )
        return first


def eval_dtf(probe: DtfProbe, delta: ModImage) -> ModImage:
    if len(delta) != probe.length or delta.modulus != probe.modulus:
        raise DimensionError("differential does not match the probe")
    out = probe.responses(delta.pixels)
    return ModImage(out, *_output_dims(probe), probe.modulus)


def _output_dims(probe: DtfProbe) -> tuple[int, int]:
    return round_dims(probe.spec, probe.dims)[-1]


def all_differentials(length: int, modulus: int) -> np.ndarray:
    """Every vector in ``(Z/G)^L`` as rows; row index is the base-G number
    with pixel 0 as the least significant digit."""
    if modulus**length > EXHAUSTIVE_LIMIT:
        raise ScaleError(f"{modulus}^{length} differentials exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")
    grid = np.array(list(itertools.product(range(modulus), repeat=length)), dtype=np.int64)
    return grid[:, ::-1]


def _index(rows: np.ndarray, modulus: int) -> np.ndarray:
    return rows @ (modulus ** np.arange(rows.shape[-1], dtype=np.int64))


def _exhaustive_ok(probe: DtfProbe, exhaustive: Optional[bool], limit: int) -> bool:
    size = probe.modulus**probe.length
    if exhaustive is None:
        return size <= limit
    if exhaustive and size > limit:
        raise ScaleError(f"{size} differentials exceed the exhaustive limit {limit}")
    return exhaustive


def check_additivity(probe: DtfProbe, trials: int = 500, exhaustive: Optional[bool] = None,
                     seed: int = 0) -> Verdict:
    """``H(a + b) == H(a) + H(b)`` over all pairs (small instances) or ``trials`` samples."""
    G = probe.modulus
    if _exhaustive_ok(probe, exhaustive, PAIRWISE_LIMIT):
        deltas = all_differentials(probe.length, G)
        table = probe.response(deltas)
        n = len(deltas)
        a, b = np.divmod(np.arange(n * n), n)
        sums = (deltas[a] + deltas[b]) % G
        lhs = table[_index(sums, G)]
        rhs = (table[a] + table[b]) % G
        mode, d1, d2 = "exhaustive", deltas[a], deltas[b]
    else:
        rng = np.random.default_rng(seed)
        d1 = rng.integers(0, G, (trials, probe.length))
        d2 = rng.integers(0, G, (trials, probe.length))
        lhs = probe.response((d1 + d2) % G)
        rhs = (probe.response(d1) + probe.response(d2)) % G
        mode = "sampled"
    bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
    counter = None
    if bad.size:
        j = bad[0]
        counter = {"delta1": d1[j].tolist(), "delta2": d2[j].tolist(),
                   "H(delta1+delta2)": lhs[j].tolist(), "H(delta1)+H(delta2)": rhs[j].tolist()}
    return Verdict("additivity", not bad.size, len(lhs), mode, seed if mode == "sampled" else None,
                   counter, preset=probe.spec.name)


def check_multiplicability(probe: DtfProbe, trials: int = 500, exhaustive: Optional[bool] = None,
                           seed: int = 0) -> Verdict:
    """``H(s * d) == s * H(d)`` for every scalar ``s`` and every (or sampled) ``d``."""
    G = probe.modulus
    if _exhaustive_ok(probe, exhaustive, EXHAUSTIVE_LIMIT // G if G <= EXHAUSTIVE_LIMIT else 0):
        deltas = all_differentials(probe.length, G)
        table = probe.response(deltas)
        scalars = np.repeat(np.arange(G), len(deltas))
        d = np.tile(deltas, (G, 1))
        lhs = table[_index((scalars[:, None] * d) % G, G)]
        rhs = (scalars[:, None] * np.tile(table, (G, 1))) % G
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        scalars = rng.integers(0, G, trials)
        d = rng.integers(0, G, (trials, probe.length))
        lhs = probe.response((scalars[:, None] * d) % G)
        rhs = (scalars[:, None] * probe.response(d)) % G
        mode = "sampled"
    bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
    counter = None
    if bad.size:
        j = bad[0]
        counter = {"scalar": int(scalars[j]), "delta": d[j].tolist(),
                   "H(s*delta)": lhs[j].tolist(), "s*H(delta)": rhs[j].tolist()}
    return Verdict("multiplicability", not bad.size, len(lhs), mode, seed if mode == "sampled" else None,
                   counter, preset=probe.spec.name)


def check_bijectivity(probe: DtfProbe) -> Verdict:
    """Enumerate every differential and count distinct responses."""
    deltas = all_differentials(probe.length, probe.modulus)
    table = probe.response(deltas)
    distinct = np.unique(table, axis=0).shape[0]
    counter = None
    if distinct != len(deltas):
        idx = _index(table, probe.modulus)
        _, first, counts = np.unique(idx, return_index=True, return_counts=True)
        clash = idx[first[np.argmax(counts > 1)]]
        a, b = np.flatnonzero(idx == clash)[:2]
        counter = {"delta1": deltas[a].tolist(), "delta2": deltas[b].tolist(), "H": table[a].tolist()}
    return Verdict("bijectivity", distinct == len(deltas), len(deltas), "exhaustive", None, counter,
                   note=f"{distinct}/{len(deltas)} distinct images", preset=probe.spec.name)


def check_injectivity_sampled(probe: DtfProbe, trials: int = 1000, seed: int = 0) -> Verdict:
    """Collision search on random differentials; can refute but never certify."""
    rng = np.random.default_rng(seed)
    deltas = np.unique(rng.integers(0, probe.modulus, (trials, probe.length)), axis=0)
    table = probe.response(deltas)
    distinct = np.unique(table, axis=0).shape[0]
    if distinct < len(deltas):
        return Verdict("injectivity", False, len(deltas), "sampled", seed,
                       note="collision found", preset=probe.spec.name)
    return Verdict("injectivity", None, len(deltas), "sampled", seed,
                   note="no collision found", preset=probe.spec.name)


def check_cdtf_composition(spec: CipherSpec, material: RoundMaterial, dims: tuple[int, int],
                           trials: int = 200, exhaustive: Optional[bool] = None, seed: int = 0) -> Verdict:
    """Whole-cipher differential response equals the chain of per-round responses.

    Each round's response is measured on its own (zero-based) input, so the
    per-round maps are computed independently of the full encryption.
    """
    probe = DtfProbe(spec, material, dims, seed=seed)
    G = spec.modulus
    if _exhaustive_ok(probe, exhaustive, EXHAUSTIVE_LIMIT):
        deltas = all_differentials(probe.length, G)
        mode = "exhaustive"
    else:
        deltas = np.random.default_rng(seed).integers(0, G, (trials, probe.length))
        mode = "sampled"
    whole = probe.response(deltas)

    path = round_dims(spec, dims)
    chained = deltas
    for i in range(spec.rounds):
        zero = np.zeros(probe.length, dtype=np.int64)
        ref, _ = encrypt_round(spec, material[i], zero, path[i])
        out, _ = encrypt_round(spec, material[i], chained % G, path[i])
        chained = (out - ref) % G
    bad = np.flatnonzero(np.any(whole != chained, axis=1))
    counter = None
    if bad.size:
        j = bad[0]
        counter = {"delta": deltas[j].tolist(), "whole": whole[j].tolist(), "composed": chained[j].tolist()}
    return Verdict("cdtf_composition", not bad.size, len(deltas), mode,
                   seed if mode == "sampled" else None, counter, preset=spec.name)


def bam_suite(spec: CipherSpec, material: RoundMaterial, dims: tuple[int, int],
              trials: int = 500, seed: int = 0) -> list[Verdict]:
    """All four checks; bijectivity falls back to a sampled collision search
    when the instance is too large to enumerate."""
    probe = DtfProbe(spec, material, dims, seed=seed)
    verdicts = []
    try:
        probe.responses(np.random.default_rng(seed).integers(0, spec.modulus, (trials, probe.length)))
        verdicts.append(Verdict("base_independence", True, trials, "sampled", seed, preset=spec.name))
    except NotADTFError as exc:
        verdicts.append(Verdict("base_independence", False, trials, "sampled", seed,
                                {"delta": exc.delta, "responses": exc.responses}, preset=spec.name))
    if spec.modulus**probe.length <= EXHAUSTIVE_LIMIT:
        verdicts.append(check_bijectivity(probe))
    else:
        verdicts.append(check_injectivity_sampled(probe, trials, seed))
    verdicts.append(check_additivity(probe, trials, seed=seed))
    verdicts.append(check_multiplicability(probe, trials, seed=seed))
    if spec.rounds >= 2:
        verdicts.append(check_cdtf_composition(spec, material, dims, trials, seed=seed))
    return verdicts
