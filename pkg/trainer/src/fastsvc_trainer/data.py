"""Synthetic singing clips for desk-scale training: harmonic tones with
vibrato pitch and slow amplitude envelopes, with exact ground-truth F0."""

from dataclasses import dataclass, field

import numpy as np

from .features import (
    F0_HOP,
    LINGUISTIC_HOP,
    SAMPLE_RATE,
    excitation_conditioning,
    loudness_conditioning,
    mock_linguistic,
)

N_HARMONICS = 8
BREATH_NOISE = 0.004  # broadband floor; keeps every STFT bin matchable


@dataclass
class ToyClip:
    audio: np.ndarray          # [T] float32
    f0_frames: np.ndarray      # [T / 80] float64, exact synthesis pitch
    linguistic: np.ndarray     # [T / 320, dim] float32
    excitation: np.ndarray     # [T] float32
    loudness: np.ndarray       # [T] float32, normalized
    speaker_id: int


@dataclass
class ToyDataset:
    clips: list = field(default_factory=list)
    linguistic_dim: int = 32
    seed: int = 0

    def __len__(self):
        return len(self.clips)


def _synth_clip(rng, n_samples, speaker_count):
    t = np.arange(n_samples) / SAMPLE_RATE
    base = rng.uniform(180.0, 260.0)
    vib_rate = rng.uniform(4.0, 6.5)
    vib_depth = rng.uniform(0.03, 0.08)
    vib_phase = rng.uniform(0, 2 * np.pi)
    f0 = base * 2.0 ** (vib_depth * np.sin(2 * np.pi * vib_rate * t + vib_phase))

    phase = np.cumsum(2 * np.pi * f0 / SAMPLE_RATE)
    amps = 1.0 / np.arange(1, N_HARMONICS + 1)
    amps *= rng.uniform(0.7, 1.0, N_HARMONICS)
    audio = np.zeros(n_samples)
    for k in range(1, N_HARMONICS + 1):
        audio += amps[k - 1] * np.sin(k * phase)
    env = 0.75 + 0.2 * np.sin(
        2 * np.pi * rng.uniform(1.0, 2.5) * t + rng.uniform(0, 2 * np.pi))
    audio *= env
    audio += BREATH_NOISE * rng.standard_normal(n_samples)
    audio *= 0.5 / np.max(np.abs(audio))

    f0_frames = f0[::F0_HOP].copy()
    speaker = int(rng.integers(0, speaker_count)) if speaker_count else 0
    return audio.astype(np.float32), f0_frames, speaker


def make_toy_dataset(n_clips=6, segment_seconds=1.0, linguistic_dim=32,
                     speaker_count=0, seed=0) -> ToyDataset:
    """Deterministic from ``seed``; every clip exactly segment_seconds long."""
    rng = np.random.default_rng(seed)
    n_samples = int(round(segment_seconds * SAMPLE_RATE))
    n_samples -= n_samples % LINGUISTIC_HOP
    dataset = ToyDataset(linguistic_dim=linguistic_dim, seed=seed)
    for i in range(n_clips):
        audio, f0_frames, speaker = _synth_clip(rng, n_samples, speaker_count)
        dataset.clips.append(ToyClip(
            audio=audio,
            f0_frames=f0_frames,
            linguistic=mock_linguistic(audio, linguistic_dim,
                                       projection_seed=seed),
            excitation=excitation_conditioning(f0_frames, n_samples,
                                               noise_seed=seed * 1000 + i),
            loudness=loudness_conditioning(audio, n_samples),
            speaker_id=speaker,
        ))
    return dataset


def dataset_digest(dataset: ToyDataset) -> str:
    """Stable content hash, for regeneration-determinism checks."""
    import hashlib

    h = hashlib.sha256()
    for clip in dataset.clips:
        for arr in (clip.audio, clip.f0_frames, clip.linguistic,
                    clip.excitation, clip.loudness):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(bytes([clip.speaker_id]))
    return h.hexdigest()
