"""`.fsvc` weight bundles: single-file, little-endian, CRC-protected.

Layout (see docs/formats.md for the byte-level description):

    magic "FSVC" | u32 version | u32 config_json_len | u32 tensor_count
    | u32 crc32 over everything after this 20-byte header
    | config JSON | tensor table | contiguous f32 payload

Tensors are stored sorted by name; saving the same bundle twice produces
byte-identical files.
"""

import json
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .discriminator import DiscriminatorConfig, disc_expected_shapes
from .errors import (
    BundleChecksumError,
    BundleFormatError,
    BundleValidationError,
    BundleVersionError,
)
from .generator import GeneratorConfig, expected_tensor_shapes, validate_config

MAGIC = b"FSVC"
FORMAT_VERSION = 1
_DTYPE_F32 = 0
_HEADER = struct.Struct("<4sIIII")

GEN_PREFIXES = ("gen.", "spk.")
DISC_PREFIX = "disc."


@dataclass
class WeightBundle:
    config: GeneratorConfig
    tensors: dict = field(default_factory=dict)
    disc_config: DiscriminatorConfig | None = None
    format_version: int = FORMAT_VERSION
    checksum: int = 0

    def freeze(self) -> "WeightBundle":
        for name, arr in self.tensors.items():
            arr = np.ascontiguousarray(arr, dtype=np.float32)
            arr.flags.writeable = False
            self.tensors[name] = arr
        return self


@dataclass
class BundleReport:
    capabilities: dict
    param_counts: dict
    speaker_names: list
    total_params: int


def _config_json(bundle: WeightBundle) -> bytes:
    doc = {
        "generator": bundle.config.to_dict(),
        "discriminator": (
            bundle.disc_config.to_dict() if bundle.disc_config else None
        ),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def save_bundle(bundle: WeightBundle, path) -> None:
    validate_config(bundle.config)
    config_blob = _config_json(bundle)
    names = sorted(bundle.tensors)

    table = bytearray()
    payload = bytearray()
    for name in names:
        arr = np.ascontiguousarray(bundle.tensors[name], dtype="<f4")
        encoded = name.encode()
        table += struct.pack("<I", len(encoded))
        table += encoded
        table += struct.pack("<II", _DTYPE_F32, arr.ndim)
        table += struct.pack(f"<{arr.ndim}I", *arr.shape)
        table += struct.pack("<Q", len(payload))
        payload += arr.tobytes()

    body = config_blob + bytes(table) + bytes(payload)
    crc = zlib.crc32(body) & 0xFFFFFFFF
    header = _HEADER.pack(MAGIC, bundle.format_version, len(config_blob),
                          len(names), crc)
    with open(path, "wb") as f:
        f.write(header)
        f.write(body)
    bundle.checksum = crc


class _Reader:
    def __init__(self, blob: bytes, offset: int):
        self.blob = blob
        self.pos = offset

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.blob):
            raise BundleFormatError("file truncated or table out of bounds")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]


def load_bundle(path) -> WeightBundle:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise BundleFormatError("file shorter than header")
    magic, version, config_len, tensor_count, crc = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BundleFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise BundleVersionError(f"unsupported format version {version}")
    body = blob[_HEADER.size:]
    actual = zlib.crc32(body) & 0xFFFFFFFF
    if actual != crc:
        raise BundleChecksumError(
            f"checksum mismatch: header says {crc:#010x}, "
            f"payload gives {actual:#010x}"
        )

    reader = _Reader(blob, _HEADER.size)
    config_blob = reader.take(config_len)
    try:
        doc = json.loads(config_blob.decode())
        config = GeneratorConfig.from_dict(doc["generator"])
        disc_config = (
            DiscriminatorConfig.from_dict(doc["discriminator"])
            if doc.get("discriminator") else None
        )
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise BundleFormatError(f"config block unreadable: {exc}") from exc

    records = []
    for _ in range(tensor_count):
        name = reader.take(reader.u32()).decode(errors="replace")
        dtype = reader.u32()
        if dtype != _DTYPE_F32:
            raise BundleFormatError(f"tensor {name}: unsupported dtype {dtype}")
        rank = reader.u32()
        if rank > 8:
            raise BundleFormatError(f"tensor {name}: implausible rank {rank}")
        dims = tuple(reader.u32() for _ in range(rank))
        offset = reader.u64()
        records.append((name, dims, offset))

    payload_start = reader.pos
    payload = blob[payload_start:]
    tensors = {}
    for name, dims, offset in records:
        count = 1
        for d in dims:
            count *= d
        end = offset + 4 * count
        if offset < 0 or end > len(payload):
            raise BundleFormatError(
                f"tensor {name}: payload span [{offset}, {end}) out of bounds"
            )
        if name in tensors:
            raise BundleValidationError(f"duplicate tensor name {name}")
        arr = np.frombuffer(payload, dtype="<f4", count=count,
                            offset=offset).reshape(dims).copy()
        tensors[name] = arr

    bundle = WeightBundle(config=config, tensors=tensors,
                          disc_config=disc_config, format_version=version,
                          checksum=crc)
    _validate_shapes(bundle)
    return bundle.freeze()


def _section(names, prefixes) -> set:
    return {n for n in names if any(n.startswith(p) for p in prefixes)}


def _check_section(label: str, present: set, expected: dict, tensors: dict):
    missing = sorted(set(expected) - present)
    extra = sorted(present - set(expected))
    bad = sorted(
        n for n in present & set(expected)
        if tensors[n].shape != tuple(expected[n])
    )
    if missing or extra or bad:
        parts = []
        if missing:
            parts.append(f"missing={missing}")
        if extra:
            parts.append(f"extra={extra}")
        if bad:
            detail = [
                f"{n}: got {tensors[n].shape}, want {tuple(expected[n])}"
                for n in bad
            ]
            parts.append(f"misshaped={detail}")
        raise BundleValidationError(f"{label} section invalid: " + "; ".join(parts))


def _validate_shapes(bundle: WeightBundle) -> None:
    try:
        validate_config(bundle.config)
    except Exception as exc:
        raise BundleValidationError(f"bundle config invalid: {exc}") from exc
    names = set(bundle.tensors)
    gen_present = _section(names, GEN_PREFIXES)
    disc_present = _section(names, (DISC_PREFIX,))
    unknown = names - gen_present - disc_present
    if unknown:
        raise BundleValidationError(
            f"unknown tensor names: {sorted(unknown)[:5]}"
        )
    if gen_present:
        _check_section("generator", gen_present,
                       expected_tensor_shapes(bundle.config), bundle.tensors)
    if disc_present:
        if bundle.disc_config is None:
            raise BundleValidationError(
                "discriminator tensors present but no discriminator config"
            )
        _check_section("discriminator", disc_present,
                       disc_expected_shapes(bundle.disc_config),
                       bundle.tensors)


def random_bundle(config: GeneratorConfig, seed: int = 0,
                  disc_config: DiscriminatorConfig | None = None,
                  scale: float = 0.02) -> WeightBundle:
    """Seeded random-init bundle (weights ~ N(0, scale), zero biases);
    used by the benchmark and the self-contained test suite."""
    rng = np.random.default_rng(seed)
    shapes = dict(expected_tensor_shapes(config))
    if disc_config is not None:
        shapes.update(disc_expected_shapes(disc_config))
    tensors = {}
    for name in sorted(shapes):
        shape = shapes[name]
        if name.endswith(".b"):
            tensors[name] = np.zeros(shape, dtype=np.float32)
        else:
            tensors[name] = rng.normal(0.0, scale, shape).astype(np.float32)
    return WeightBundle(config=config, tensors=tensors,
                        disc_config=disc_config).freeze()


def validate_bundle(bundle: WeightBundle) -> BundleReport:
    """Capability flags and per-section parameter counts, by direct
    summation over the stored tensors."""
    names = set(bundle.tensors)
    gen_expected = set(expected_tensor_shapes(bundle.config))
    disc_expected = (
        set(disc_expected_shapes(bundle.disc_config))
        if bundle.disc_config else set()
    )
    gen_ok = bool(gen_expected) and gen_expected <= names
    disc_ok = bool(disc_expected) and disc_expected <= names
    speaker_ok = bundle.config.speaker_count > 0 and "spk.table" in names

    def count(section_names):
        return int(sum(bundle.tensors[n].size for n in section_names
                       if n in bundle.tensors))

    counts = {
        "generator": count(gen_expected),
        "discriminator": count(disc_expected),
    }
    speaker_names = list(bundle.config.speaker_names) or [
        f"spk{i}" for i in range(bundle.config.speaker_count)
    ]
    return BundleReport(
        capabilities={
            "generator": gen_ok,
            "discriminator": disc_ok,
            "speaker_table": speaker_ok,
        },
        param_counts=counts,
        speaker_names=speaker_names,
        total_params=count(names),
    )
