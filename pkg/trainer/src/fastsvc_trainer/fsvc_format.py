"""Writer for the engine's `.fsvc` bundle format.

Independent implementation of the documented layout (magic "FSVC",
version, CRC over all post-header bytes, sorted compact config JSON,
tensor table, contiguous little-endian f32 payload); the engine is the
reader that validates it.
"""

import json
import struct
import zlib

import numpy as np

MAGIC = b"FSVC"
FORMAT_VERSION = 1
_DTYPE_F32 = 0


def config_json(gen_config: dict, disc_config: dict | None) -> bytes:
    doc = {"generator": gen_config, "discriminator": disc_config}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def write_fsvc(path, tensors: dict, gen_config: dict,
               disc_config: dict | None = None) -> None:
    blob = config_json(gen_config, disc_config)
    table = bytearray()
    payload = bytearray()
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f4")
        encoded = name.encode()
        table += struct.pack("<I", len(encoded)) + encoded
        table += struct.pack("<II", _DTYPE_F32, arr.ndim)
        table += struct.pack(f"<{arr.ndim}I", *arr.shape)
        table += struct.pack("<Q", len(payload))
        payload += arr.tobytes()
    body = blob + bytes(table) + bytes(payload)
    crc = zlib.crc32(body) & 0xFFFFFFFF
    with open(path, "wb") as f:
        f.write(struct.pack("<4sIIII", MAGIC, FORMAT_VERSION, len(blob),
                            len(tensors), crc))
        f.write(body)
