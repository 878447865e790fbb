"""Command-line interface.

Exit codes: 0 success, 1 I/O or oracle failure, 2 usage, 3 file format,
4 dimension/modulus mismatch, 5 verification mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time

import numpy as np

from . import fileio
from .algebra import ModImage, mod_add, weighted_modsum
from .attack import build_atoms, recover, sparsify_atoms
from .bam import bam_suite
from .cipher import PRESET_NAMES, decrypt, encrypt, keygen, preset
from .errors import (
    ConfigurationError,
    DimensionError,
    FixtureMissError,
    FormatError,
    PresetNotFound,
    SeedError,
)
from .keyschedule import decode_seed
from .oracle import (
    WORKED_EXAMPLE_CIPHERTEXT,
    WORKED_EXAMPLE_PLAINTEXT,
    cipher_oracle,
    load_fixture_oracle,
    worked_example_oracle,
)

EXIT_IO, EXIT_USAGE, EXIT_FORMAT, EXIT_DIMENSION, EXIT_MISMATCH = 1, 2, 3, 4, 5

# Intermediate values of the reference worked example, used by ``demo``.
EXPECTED_DIFFS = (
    (1, 254, 255, 2, 1, 0, 0, 0, 0),
    (0, 1, 254, 255, 2, 1, 0, 0, 0),
    (0, 0, 1, 254, 255, 2, 1, 0, 0),
    (255, 0, 0, 1, 254, 255, 2, 1, 0),
    (253, 255, 0, 0, 1, 254, 255, 2, 1),
    (0, 253, 255, 0, 0, 1, 254, 255, 2),
    (5, 0, 253, 255, 0, 0, 1, 254, 255),
    (1, 3, 255, 255, 0, 0, 0, 1, 254),
    (254, 255, 2, 1, 0, 0, 0, 0, 1),
)
EXPECTED_DELTA = (171, 255, 61, 116, 63, 191, 203, 242, 62)


class Mismatch(Exception):
    pass


def seed_digest(seed: str | None) -> str | None:
    if seed is None:
        return None
    return hashlib.sha256(decode_seed(seed)).hexdigest()[:16]


def _modulus(args) -> int:
    return 1 << args.depth


def _read(args, path) -> ModImage:
    return fileio.read_image(path, args.format, args.height, args.width, _modulus(args))


def _spec_and_material(args, plain_dims=None, cipher_dims=None):
    """Key material from ``--material`` or from ``--preset`` + ``--seed``."""
    if args.material:
        spec, material, dims = fileio.load_material(args.material)
        return spec, material, dims
    if not (args.preset and args.seed):
        raise argparse.ArgumentError(None, "give --material, or --preset and --seed")
    spec = preset(args.preset, rounds=args.rounds, modulus=_modulus(args))
    if plain_dims is None:
        plain_dims = spec.plaintext_dims(*cipher_dims)
    return spec, keygen(spec, args.seed, *plain_dims, args.generator), tuple(plain_dims)


def cmd_keygen(args):
    if not (args.height and args.width):
        raise argparse.ArgumentError(None, "keygen needs --height and --width")
    spec = preset(args.preset, rounds=args.rounds, modulus=_modulus(args))
    material = keygen(spec, args.seed, args.height, args.width, args.generator)
    fileio.save_material(args.output, spec, material, (args.height, args.width))
    fileio.emit_report({"command": "keygen", "preset": spec.name, "dims": [args.height, args.width],
                        "G": spec.modulus, "rounds": spec.rounds, "seed_digest": seed_digest(args.seed),
                        "generator": args.generator, "output": args.output})


def cmd_encrypt(args):
    m = _read(args, args.input)
    if args.material is None:
        args.depth = int(np.log2(m.modulus))
    spec, material, _ = _spec_and_material(args, plain_dims=m.shape)
    c = encrypt(spec, material, m)
    fileio.write_image(args.output, c, args.format)
    fileio.emit_report({"command": "encrypt", "preset": spec.name, "dims": list(m.shape),
                        "cipher_dims": list(c.shape), "G": spec.modulus, "rounds": spec.rounds,
                        "seed_digest": seed_digest(args.seed)})


def cmd_decrypt(args):
    c = _read(args, args.input)
    if args.material is None:
        args.depth = int(np.log2(c.modulus))
    spec, material, _ = _spec_and_material(args, cipher_dims=c.shape)
    m = decrypt(spec, material, c)
    fileio.write_image(args.output, m, args.format)
    fileio.emit_report({"command": "decrypt", "preset": spec.name, "dims": list(m.shape),
                        "cipher_dims": list(c.shape), "G": spec.modulus, "rounds": spec.rounds,
                        "seed_digest": seed_digest(args.seed)})


def cmd_build_atoms(args):
    if args.fixture:
        oracle = load_fixture_oracle(args.fixture, modulus=_modulus(args))
        name = "fixture"
        rounds = None
    else:
        if not args.material and not (args.height and args.width):
            raise argparse.ArgumentError(None, "a local oracle needs plaintext --height and --width")
        spec, material, dims = _spec_and_material(args, plain_dims=(args.height, args.width))
        oracle = cipher_oracle(spec, material, *dims)
        name, rounds = spec.name, spec.rounds
    t0 = time.perf_counter()
    atoms = build_atoms(oracle, jobs=args.jobs)
    if args.sparse:
        atoms = sparsify_atoms(atoms)
    elapsed = time.perf_counter() - t0
    fileio.save_atoms(args.atoms, atoms)
    nnz = atoms.nnz_per_atom()
    fileio.emit_report({"command": "build-atoms", "preset": name, "dims": list(atoms.plain_dims),
                        "cipher_dims": list(atoms.cipher_dims), "G": atoms.modulus, "rounds": rounds,
                        "seed_digest": seed_digest(args.seed), "queries": oracle.queries,
                        "nnz_total": int(nnz.sum()), "nnz_max": int(nnz.max()),
                        "density": atoms.density(), "sparse": atoms.is_sparse,
                        "timings": {"build_atoms": elapsed}, "atoms": args.atoms})


def cmd_recover(args):
    atoms = fileio.load_atoms(args.atoms)
    args.depth = int(np.log2(atoms.modulus))
    c = _read(args, args.input)
    t0 = time.perf_counter()
    m = recover(atoms, c)
    elapsed = time.perf_counter() - t0
    fileio.write_image(args.output, m, args.format)
    fileio.emit_report({"command": "recover", "dims": list(m.shape), "cipher_dims": list(c.shape),
                        "G": atoms.modulus, "queries": 0, "sparse": atoms.is_sparse,
                        "timings": {"recover": elapsed}, "output": args.output})


def cmd_check(args):
    spec = preset(args.preset, rounds=args.rounds, modulus=_modulus(args) if not args.modulus else args.modulus)
    h, w = args.height or 1, args.width or 3
    material = keygen(spec, args.seed, h, w, args.generator)
    dims = spec.working_dims(h, w)
    failed = False
    for verdict in bam_suite(spec, material, dims, trials=args.trials, seed=args.rng_seed):
        record = verdict.to_record()
        record.update(command="check", dims=list(dims), G=spec.modulus, rounds=spec.rounds,
                      seed_digest=seed_digest(args.seed))
        fileio.emit_report(record)
        failed |= verdict.passed is False
    if failed:
        raise Mismatch(f"{spec.name}: at least one differential property failed")


def run_worked_example(out=print) -> bool:
    """Replay the reference 9-pixel transcript against a fixture oracle."""
    oracle = worked_example_oracle()
    atoms = build_atoms(oracle)
    ok = True

    def line(label, got, want):
        nonlocal ok
        match = tuple(got) == tuple(want)
        ok &= match
        out(f"{label:<10} {list(got)!s:<45} {'ok' if match else 'MISMATCH, expected ' + str(list(want))}")

    out(f"oracle queries: {oracle.queries} (expected 10)")
    ok &= oracle.queries == 10
    out(f"{'M0':<10} {atoms.base.tolist()}")
    for i in range(9):
        line(f"dM{i + 1}", atoms.diff(i).tolist(), EXPECTED_DIFFS[i])
    c = ModImage.vector(WORKED_EXAMPLE_CIPHERTEXT, 256)
    delta = weighted_modsum(c.tolist(), [atoms.diff(i) for i in range(9)])
    line("dM", delta.tolist(), EXPECTED_DELTA)
    line("M", mod_add(delta, atoms.base).tolist(), WORKED_EXAMPLE_PLAINTEXT)
    line("recover", recover(atoms, c).tolist(), WORKED_EXAMPLE_PLAINTEXT)
    out(f"oracle queries after recovery: {oracle.queries}")
    ok &= oracle.queries == 10
    return ok


def cmd_demo(args):
    if not run_worked_example():
        raise Mismatch("worked example does not reproduce")


def _image_args(p):
    p.add_argument("--format", choices=["pgm", "raw", "csv"], help="override format from extension")
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--depth", type=int, choices=[8, 16], default=8, help="bit depth for raw/CSV images")


def _key_args(p, required=False):
    p.add_argument("--preset", choices=PRESET_NAMES, required=required)
    p.add_argument("--seed", help="lowercase hex seed", required=required)
    p.add_argument("--rounds", type=int, help="override the preset's round count")
    p.add_argument("--generator", choices=["logistic", "counter"], default="logistic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modattack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="derive round material from a seed")
    _key_args(p, required=True)
    _image_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_keygen)

    for name, func in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} an image")
        _key_args(p)
        _image_args(p)
        p.add_argument("--material", help="material file from keygen")
        p.add_argument("input")
        p.add_argument("output")
        p.set_defaults(func=func)

    p = sub.add_parser("build-atoms", help="query an oracle LL+1 times and save the atoms")
    _key_args(p)
    _image_args(p)
    p.add_argument("--material")
    p.add_argument("--fixture", help="transcript file of 'ciphertext-csv -> plaintext-csv' lines")
    p.add_argument("--atoms", required=True, help="output atoms file")
    p.add_argument("--sparse", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_build_atoms)

    p = sub.add_parser("recover", help="recover a plaintext from saved atoms (no oracle)")
    _image_args(p)
    p.add_argument("--atoms", required=True)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("check", help="test the differential properties of a keyed preset")
    _key_args(p, required=True)
    _image_args(p)
    p.add_argument("--modulus", type=int, help="arbitrary modulus (overrides --depth)")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("demo", help="replay the reference 9-pixel worked example")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except argparse.ArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"modattack: error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (PresetNotFound, SeedError) as exc:
        print(f"modattack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"modattack: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (DimensionError, ConfigurationError) as exc:
        print(f"modattack: dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except Mismatch as exc:
        print(f"modattack: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (OSError, FixtureMissError) as exc:
        print(f"modattack: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
