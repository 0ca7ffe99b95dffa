"""Cross-implementation parity: run the engine CLI and the torch model on
identical inputs and compare waveforms sample by sample.

The engine is used strictly through its external surfaces: the trainer
writes .f0/.ling/WAV/.fsvc files, invokes `fastsvc convert` in a
subprocess, and reads the output WAV back.
"""

import struct
import subprocess
import sys
import wave
from pathlib import Path

import numpy as np
import torch

from .features import (
    F0_HOP,
    LINGUISTIC_HOP,
    SAMPLE_RATE,
    excitation_conditioning,
    loudness_conditioning,
)
from .models import Generator

ENGINE_CONVERT_SEED = 0  # fastsvc convert uses a fixed excitation seed


def write_wav(path, samples):
    pcm = np.floor(np.clip(np.asarray(samples, np.float64), -1.0, 1.0)
                   * 32767.0 + 0.5).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(SAMPLE_RATE)
        f.writeframes(pcm.tobytes())


def read_wav(path):
    with wave.open(str(path), "rb") as f:
        raw = f.readframes(f.getnframes())
    return np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32767.0


def write_f0(path, values, hop=F0_HOP):
    values = np.asarray(values, dtype="<f4")
    with open(path, "wb") as f:
        f.write(b"F0C1")
        f.write(struct.pack("<II", hop, len(values)))
        f.write(values.tobytes())


def write_ling(path, data, hop=LINGUISTIC_HOP):
    data = np.asarray(data, dtype="<f4")
    with open(path, "wb") as f:
        f.write(b"LING")
        f.write(struct.pack("<III", hop, data.shape[1], data.shape[0]))
        f.write(data.tobytes())


def run_engine_convert(bundle_path, audio_path, f0_path, ling_path, out_path,
                       speaker=None):
    cmd = [sys.executable, "-m", "fastsvc", "convert",
           "--audio", str(audio_path), "--f0", str(f0_path),
           "--ling", str(ling_path), "--bundle", str(bundle_path),
           "--out", str(out_path), "--mode", "strict", "--threads", "1"]
    if speaker is not None:
        cmd += ["--speaker", str(speaker)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"engine convert failed: {proc.stderr.strip()}")
    return out_path


def _random_case(rng, frames, dim):
    """One synthetic conversion case: features, pitch, source audio."""
    target = frames * LINGUISTIC_HOP
    ling = rng.standard_normal((frames, dim)).astype(np.float32)
    t = np.arange(target // F0_HOP) * F0_HOP / SAMPLE_RATE
    f0 = rng.uniform(150, 300) * 2 ** (0.1 * np.sin(2 * np.pi * 5 * t))
    tt = np.arange(target) / SAMPLE_RATE
    audio = 0.4 * np.sin(2 * np.pi * rng.uniform(180, 260) * tt)
    audio *= 0.6 + 0.3 * np.sin(2 * np.pi * 2.0 * tt)
    return ling, f0.astype(np.float32), audio


def trainer_forward(generator: Generator, ling, f0_f32, source_audio,
                    speaker_id=None):
    """Torch forward on the same conditioning the engine derives."""
    target = ling.shape[0] * LINGUISTIC_HOP
    # match the engine's file round trip: f0 is stored as float32
    f0 = np.asarray(f0_f32, dtype=np.float32).astype(np.float64)
    exc = excitation_conditioning(f0, target, noise_seed=ENGINE_CONVERT_SEED)
    loud = loudness_conditioning(source_audio, target)
    generator.eval()
    with torch.no_grad():
        out = generator(
            torch.from_numpy(ling).unsqueeze(0),
            torch.from_numpy(exc).unsqueeze(0),
            torch.from_numpy(loud).unsqueeze(0),
            torch.tensor([speaker_id]) if speaker_id is not None else None,
        )
    return out.squeeze(0).numpy()


def parity_check(generator: Generator, bundle_path, workdir, n_inputs=10,
                 seconds=1.0, seed=0) -> float:
    """Max abs engine-vs-trainer output difference over random 1 s inputs."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    frames = int(seconds * SAMPLE_RATE) // LINGUISTIC_HOP
    worst = 0.0
    for i in range(n_inputs):
        ling, f0, audio = _random_case(rng, frames, generator.arch.linguistic_dim)
        audio_path = workdir / f"in_{i}.wav"
        write_wav(audio_path, audio)
        write_f0(workdir / f"in_{i}.f0", f0)
        write_ling(workdir / f"in_{i}.ling", ling)
        out_path = run_engine_convert(
            bundle_path, audio_path, workdir / f"in_{i}.f0",
            workdir / f"in_{i}.ling", workdir / f"out_{i}.wav")
        engine_out = read_wav(out_path)

        decoded_source = read_wav(audio_path)  # engine sees the quantized file
        ours = trainer_forward(generator, ling, f0, decoded_source)
        worst = max(worst, float(np.max(np.abs(engine_out - ours))))
    return worst
