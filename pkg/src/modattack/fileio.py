"""Image files, atom files, key-material files and run reports.

Image formats
-------------
* PGM (``P5``): maxval 255 means G = 256 (1 byte/sample), maxval 65535 means
  G = 65536 (2 bytes/sample, big-endian).  Other maxvals are rejected.
* raw: headerless little-endian samples, ``ceil(log2(G) / 8)`` bytes each;
  dims and depth come from the caller.
* CSV: decimal residues, one image row per line, comma-separated.

Atoms file (version 1, all counts little-endian uint64)
-------------------------------------------------------
``b"PCCA"``, version byte, LL, H, W, G, density byte (0 dense, 1 sparse),
cipher height, cipher width; then ``M0`` as ``H*W`` uint32 residues; then

* dense: ``LL * H * W`` uint32 residues, atom by atom;
* sparse: for each atom, its nnz (uint64), nnz 0-based indices (uint64) and
  nnz values (uint32).
"""

from __future__ import annotations

import json
import math
import re
import struct
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .algebra import ModImage
from .attack import AttackAtoms
from .cipher import CipherSpec, preset
from .errors import DimensionError, FormatError
from .keyschedule import RoundKey, RoundMaterial
from .permutation import Permutation

ATOMS_MAGIC = b"PCCA"
ATOMS_VERSION = 1
_ATOMS_HEADER = struct.Struct("<4sBQQQQBQQ")

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def depth_to_modulus(depth: int) -> int:
    if depth not in (8, 16):
        raise FormatError("depth must be 8 or 16")
    return 1 << depth


def sample_bytes(modulus: int) -> int:
    return max(1, math.ceil(math.log2(modulus) / 8))


def read_pgm(path) -> ModImage:
    data = Path(path).read_bytes()
    pos = 0
    fields = []
    for _ in range(4):
        match = _PGM_TOKEN.match(data, pos)
        if not match:
            raise FormatError(f"{path}: truncated PGM header")
        fields.append(match.group(1))
        pos = match.end()
    magic, width, height, maxval = fields
    if magic != b"P5":
        raise FormatError(f"{path}: only binary PGM (P5) is supported")
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if maxval not in (255, 65535):
        raise FormatError(f"{path}: maxval {maxval} is neither 255 nor 65535")
    pos += 1  # single whitespace byte before the raster
    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    need = width * height * dtype.itemsize
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise FormatError(f"{path}: raster has {len(raster)} bytes, expected {need}")
    pixels = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    return ModImage(pixels, height, width, maxval + 1)


def write_pgm(path, image: ModImage) -> None:
    if image.modulus not in (256, 65536):
        raise DimensionError("PGM needs G = 256 or G = 65536")
    dtype = ">u2" if image.modulus == 65536 else "u1"
    header = f"P5\n{image.width} {image.height}\n{image.modulus - 1}\n".encode()
    Path(path).write_bytes(header + image.pixels.astype(dtype).tobytes())


def read_raw(path, height: int, width: int, modulus: int) -> ModImage:
    dtype = np.dtype(f"<u{sample_bytes(modulus)}") if sample_bytes(modulus) in (1, 2, 4, 8) else None
    if dtype is None:
        raise FormatError(f"no raw sample width for G = {modulus}")
    data = Path(path).read_bytes()
    if len(data) != height * width * dtype.itemsize:
        raise DimensionError(f"{path}: {len(data)} bytes do not hold a {height}x{width} image")
    pixels = np.frombuffer(data, dtype=dtype).astype(np.int64)
    if pixels.size and pixels.max() >= modulus:
        raise FormatError(f"{path}: sample exceeds G - 1")
    return ModImage(pixels, height, width, modulus)


def write_raw(path, image: ModImage) -> None:
    Path(path).write_bytes(image.pixels.astype(f"<u{sample_bytes(image.modulus)}").tobytes())


def read_csv(path, modulus: int) -> ModImage:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([int(v) for v in line.split(",")])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-integer value") from None
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise FormatError(f"{path}: ragged or empty CSV")
    return ModImage.from_array(np.array(rows), modulus)


def write_csv(path, image: ModImage) -> None:
    lines = [",".join(str(int(v)) for v in row) for row in image.to_array()]
    Path(path).write_text("\n".join(lines) + "\n")


def image_format(path, fmt: str | None = None) -> str:
    if fmt:
        return fmt
    suffix = Path(path).suffix.lower()
    return {".pgm": "pgm", ".csv": "csv", ".raw": "raw", ".bin": "raw"}.get(suffix, "pgm")


def read_image(path, fmt: str | None = None, height=None, width=None, modulus: int = 256) -> ModImage:
    fmt = image_format(path, fmt)
    if fmt == "pgm":
        return read_pgm(path)
    if fmt == "csv":
        return read_csv(path, modulus)
    if fmt == "raw":
        if not height or not width:
            raise FormatError("raw images need --height and --width")
        return read_raw(path, height, width, modulus)
    raise FormatError(f"unknown image format {fmt!r}")


def write_image(path, image: ModImage, fmt: str | None = None) -> None:
    fmt = image_format(path, fmt)
    {"pgm": write_pgm, "csv": write_csv, "raw": write_raw}[fmt](path, image)


def save_atoms(path, atoms: AttackAtoms) -> None:
    h, w = atoms.plain_dims
    ch, cw = atoms.cipher_dims
    if atoms.modulus > 2**32:
        raise DimensionError("atoms files store residues as uint32")
    with open(path, "wb") as fh:
        fh.write(_ATOMS_HEADER.pack(ATOMS_MAGIC, ATOMS_VERSION, atoms.ciphertext_len, h, w,
                                    atoms.modulus, int(atoms.is_sparse), ch, cw))
        fh.write(atoms.base.pixels.astype("<u4").tobytes())
        if not atoms.is_sparse:
            fh.write(np.asarray(atoms.diffs).astype("<u4").tobytes())
            return
        diffs = atoms.diffs
        for i in range(atoms.ciphertext_len):
            lo, hi = diffs.indptr[i], diffs.indptr[i + 1]
            fh.write(struct.pack("<Q", hi - lo))
            fh.write(diffs.indices[lo:hi].astype("<u8").tobytes())
            fh.write(diffs.data[lo:hi].astype("<u4").tobytes())


def load_atoms(path) -> AttackAtoms:
    data = Path(path).read_bytes()
    if len(data) < _ATOMS_HEADER.size:
        raise FormatError(f"{path}: too short for an atoms header")
    magic, version, ll, h, w, G, sparse, ch, cw = _ATOMS_HEADER.unpack_from(data)
    if magic != ATOMS_MAGIC or version != ATOMS_VERSION:
        raise FormatError(f"{path}: not a version-{ATOMS_VERSION} atoms file")
    if ch * cw != ll:
        raise FormatError(f"{path}: cipher dims {ch}x{cw} disagree with LL = {ll}")
    L = h * w
    pos = _ATOMS_HEADER.size
    try:
        base = np.frombuffer(data, "<u4", L, pos).astype(np.int64)
        pos += 4 * L
        if not sparse:
            diffs = np.frombuffer(data, "<u4", ll * L, pos).astype(np.int64).reshape(ll, L)
            pos += 4 * ll * L
        else:
            indptr, indices, values = [0], [], []
            for _ in range(ll):
                (nnz,) = struct.unpack_from("<Q", data, pos)
                pos += 8
                indices.append(np.frombuffer(data, "<u8", nnz, pos).astype(np.int64))
                pos += 8 * nnz
                values.append(np.frombuffer(data, "<u4", nnz, pos).astype(np.int64))
                pos += 4 * nnz
                indptr.append(indptr[-1] + nnz)
            diffs = sp.csr_array(
                (np.concatenate(values), np.concatenate(indices), np.array(indptr)), shape=(ll, L)
            )
    except (ValueError, struct.error):
        raise FormatError(f"{path}: truncated atoms payload") from None
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes")
    if not sparse:
        diffs.setflags(write=False)
    return AttackAtoms(ModImage(base, h, w, G), diffs, (ch, cw))


def save_material(path, spec: CipherSpec, material: RoundMaterial, plain_dims) -> None:
    """Store round material and the spec it was made for as a ``.npz``."""
    arrays = {}
    for i, key in enumerate(material.rounds):
        arrays[f"perm{i}"] = key.permutation.source
        arrays[f"mask{i}"] = key.mask
    meta = {"preset": spec.name, "rounds": spec.rounds, "modulus": spec.modulus,
            "length": material.length, "plain_dims": list(plain_dims), "count": len(material)}
    if spec.variant.kernel:
        meta["kernel"] = [list(t) for t in spec.variant.kernel]
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta)), **arrays)


def load_material(path) -> tuple[CipherSpec, RoundMaterial, tuple[int, int]]:
    try:
        with np.load(path, allow_pickle=False) as npz:
            meta = json.loads(str(npz["meta"]))
            keys = tuple(
                RoundKey(Permutation(npz[f"perm{i}"]), npz[f"mask{i}"].astype(np.int64))
                for i in range(meta["count"])
            )
    except (OSError, ValueError, KeyError) as exc:
        raise FormatError(f"{path}: not a material file ({exc})") from None
    spec = preset(meta["preset"], rounds=meta["rounds"], modulus=meta["modulus"],
                  kernel=meta.get("kernel"))
    return spec, RoundMaterial(keys, meta["length"], meta["modulus"]), tuple(meta["plain_dims"])


def emit_report(record: dict, stream=None) -> None:
    """Write one JSON line to stdout (or ``stream``)."""
    stream = stream or sys.stdout
    stream.write(json.dumps(record, sort_keys=True, default=_jsonable) + "\n")
    stream.flush()


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
