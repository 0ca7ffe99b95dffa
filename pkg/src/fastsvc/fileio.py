"""File I/O: 16-bit mono WAV, `.f0` pitch files, `.ling` feature files.

Binary layouts are little-endian; see docs/formats.md.
"""

import struct
import wave
from dataclasses import dataclass

import numpy as np

from .dsp import F0Contour
from .errors import InvalidInputError, UnsupportedFormatError

SUPPORTED_SAMPLE_RATE = 16000

F0_MAGIC = b"F0C1"
LING_MAGIC = b"LING"


@dataclass
class LinguisticFeatures:
    """Frame-rate content features; one row per frame of ``hop`` samples."""

    data: np.ndarray  # [frames, dim] float32
    hop: int = 320

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32)
        if self.data.ndim != 2:
            raise InvalidInputError("linguistic features must be 2-D [frames, dim]")
        if self.hop <= 0:
            raise InvalidInputError("linguistic hop must be positive")

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a 16-bit PCM mono 16 kHz WAV; anything else is rejected."""
    try:
        with wave.open(str(path), "rb") as f:
            channels = f.getnchannels()
            width = f.getsampwidth()
            rate = f.getframerate()
            comp = f.getcomptype()
            n = f.getnframes()
            raw = f.readframes(n)
    except (wave.Error, EOFError) as exc:
        raise UnsupportedFormatError(f"not a readable WAV file: {exc}") from exc
    if comp != "NONE":
        raise UnsupportedFormatError(f"compressed WAV not supported ({comp})")
    if width != 2:
        raise UnsupportedFormatError(f"only 16-bit PCM supported, got {8 * width}-bit")
    if channels != 1:
        raise UnsupportedFormatError(f"only mono supported, got {channels} channels")
    if rate != SUPPORTED_SAMPLE_RATE:
        raise UnsupportedFormatError(
            f"only {SUPPORTED_SAMPLE_RATE} Hz supported, got {rate} Hz (no resampling)"
        )
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32767.0
    return samples, rate


def write_wav(path, samples, sample_rate: int = SUPPORTED_SAMPLE_RATE) -> None:
    x = np.asarray(samples, dtype=np.float64)
    pcm = np.floor(np.clip(x, -1.0, 1.0) * 32767.0 + 0.5).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(sample_rate)
        f.writeframes(pcm.tobytes())


def read_f0(path) -> F0Contour:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 12 or blob[:4] != F0_MAGIC:
        raise UnsupportedFormatError("not an .f0 file (bad magic)")
    hop, count = struct.unpack_from("<II", blob, 4)
    expected = 12 + 4 * count
    if len(blob) != expected:
        raise UnsupportedFormatError(
            f".f0 payload size mismatch: expected {expected} bytes, got {len(blob)}"
        )
    values = np.frombuffer(blob, dtype="<f4", count=count, offset=12)
    return F0Contour(values=values.copy(), hop=hop)


def write_f0(path, contour: F0Contour) -> None:
    with open(path, "wb") as f:
        f.write(F0_MAGIC)
        f.write(struct.pack("<II", contour.hop, len(contour.values)))
        f.write(contour.values.astype("<f4").tobytes())


def read_ling(path) -> LinguisticFeatures:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 16 or blob[:4] != LING_MAGIC:
        raise UnsupportedFormatError("not a .ling file (bad magic)")
    hop, dim, frames = struct.unpack_from("<III", blob, 4)
    expected = 16 + 4 * dim * frames
    if len(blob) != expected:
        raise UnsupportedFormatError(
            f".ling payload size mismatch: expected {expected} bytes, got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", count=dim * frames, offset=16)
    return LinguisticFeatures(data=data.reshape(frames, dim).copy(), hop=hop)


def write_ling(path, feats: LinguisticFeatures) -> None:
    with open(path, "wb") as f:
        f.write(LING_MAGIC)
        f.write(struct.pack("<III", feats.hop, feats.dim, feats.frames))
        f.write(feats.data.astype("<f4").tobytes())
