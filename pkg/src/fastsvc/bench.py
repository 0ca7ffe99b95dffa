"""Real-time-factor benchmark: synthesize seeded random features and time
the generator forward pass."""

import time
from dataclasses import dataclass

import numpy as np

from .dsp import LOUDNESS_HOP, F0_DEFAULT_HOP, generate_excitation, upsample_linear
from .errors import ConfigError
from .fileio import LinguisticFeatures
from .generator import generator_forward


@dataclass
class BenchReport:
    audio_seconds: float
    wall_seconds: float
    rtf: float
    threads: int
    mode: str
    runs: list

    def lines(self) -> list:
        return [
            f"bench.audio_seconds={self.audio_seconds:.6f}",
            f"bench.wall_seconds={self.wall_seconds:.6f}",
            f"bench.rtf={self.rtf:.6f}",
            f"bench.threads={self.threads}",
            f"bench.mode={self.mode}",
            "bench.runs=" + ",".join(f"{r:.6f}" for r in self.runs),
        ]


def _bench_inputs(bundle, seconds: float, seed: int):
    config = bundle.config
    frames = max(int(round(seconds * config.sample_rate / config.linguistic_hop)), 1)
    target = frames * config.linguistic_hop
    rng = np.random.default_rng(seed)

    ling = LinguisticFeatures(
        data=rng.standard_normal((frames, config.linguistic_dim)).astype(np.float32),
        hop=config.linguistic_hop,
    )
    n_f0 = -(-target // F0_DEFAULT_HOP)
    t = np.arange(n_f0) * F0_DEFAULT_HOP / config.sample_rate
    f0_frames = 220.0 + 20.0 * np.sin(2.0 * np.pi * 5.0 * t)
    f0_audio = upsample_linear(f0_frames, F0_DEFAULT_HOP, target)
    excitation = generate_excitation(f0_audio, config.sample_rate,
                                     noise_seed=seed)
    n_loud = -(-target // LOUDNESS_HOP)
    loud = upsample_linear(rng.uniform(-1.0, 1.0, n_loud), LOUDNESS_HOP, target)
    speaker = 0 if config.speaker_count > 0 else None
    return ling, excitation, loud, speaker, target


def run_bench(bundle, seconds: float = 10.0, threads: int = 1,
              mode: str = "strict", seed: int = 0, timed_runs: int = 5,
              warmup_runs: int = 1) -> BenchReport:
    """Median RTF over ``timed_runs`` forwards, warm-up runs excluded."""
    if seconds <= 0:
        raise ConfigError("must be positive", field="seconds")
    ling, excitation, loud, speaker, target = _bench_inputs(bundle, seconds, seed)
    audio_seconds = target / bundle.config.sample_rate

    def one_run() -> float:
        t0 = time.perf_counter()
        generator_forward(ling, excitation, loud, speaker, bundle,
                          threads=threads, mode=mode)
        return time.perf_counter() - t0

    for _ in range(warmup_runs):
        one_run()
    runs = [one_run() for _ in range(timed_runs)]
    wall = float(np.median(runs))
    return BenchReport(
        audio_seconds=audio_seconds,
        wall_seconds=wall,
        rtf=wall / audio_seconds,
        threads=threads,
        mode=mode,
        runs=runs,
    )
