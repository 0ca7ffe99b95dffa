"""Training objectives as pure evaluation functions: multi-scale STFT loss,
least-squares adversarial terms, and their weighted combination."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, LengthMismatchError
from .dsp import _hann_periodic


@dataclass(frozen=True)
class LossConfig:
    fft_sizes: tuple = (2048, 1024, 512, 256, 128, 64)
    overlap: float = 0.75
    alpha: float = 2.5
    log_floor: float = 1e-7

    def __post_init__(self):
        object.__setattr__(self, "fft_sizes", tuple(self.fft_sizes))
        if not self.fft_sizes or any(
            m < 2 or (m & (m - 1)) for m in self.fft_sizes
        ):
            raise InvalidInputError("fft sizes must be powers of two")
        if not 0.0 < self.overlap < 1.0:
            raise InvalidInputError("overlap must be in (0, 1)")
        if self.alpha <= 0:
            raise InvalidInputError("alpha must be positive")

    def hop(self, fft_size: int) -> int:
        return max(int(round(fft_size * (1.0 - self.overlap))), 1)


def stft_magnitude(x, fft_size: int, hop: int, window=None) -> np.ndarray:
    """Magnitude spectrogram [bins, frames] of centered Hann-windowed frames."""
    samples = np.asarray(getattr(x, "samples", x), dtype=np.float64)
    if samples.ndim != 1:
        raise InvalidInputError("stft input must be 1-D")
    if len(samples) < fft_size:
        raise InvalidInputError(
            f"input length {len(samples)} shorter than fft size {fft_size}"
        )
    if hop <= 0:
        raise InvalidInputError("hop must be positive")
    if window is None:
        window = _hann_periodic(fft_size)
    half = fft_size // 2
    n_frames = 1 + len(samples) // hop
    padded = np.pad(samples, (half, half + hop))
    idx = np.arange(fft_size)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = padded[idx] * window
    return np.abs(np.fft.rfft(frames, axis=1)).T


def stft_loss_breakdown(x, x_hat, config: LossConfig = LossConfig()) -> list:
    """Per-resolution (fft_size, spectral_convergence, log_magnitude) terms."""
    ref = np.asarray(getattr(x, "samples", x), dtype=np.float64)
    est = np.asarray(getattr(x_hat, "samples", x_hat), dtype=np.float64)
    if len(ref) != len(est):
        raise LengthMismatchError(
            f"signal lengths differ: {len(ref)} vs {len(est)}"
        )
    longest = max(config.fft_sizes)
    if len(ref) < longest:
        raise InvalidInputError(
            f"signals shorter than the longest fft size {longest}"
        )
    terms = []
    for m in config.fft_sizes:
        hop = config.hop(m)
        s_ref = stft_magnitude(ref, m, hop)
        s_est = stft_magnitude(est, m, hop)
        ref_norm = np.linalg.norm(s_ref)
        sc = np.linalg.norm(s_ref - s_est) / max(ref_norm, 1e-12)
        log_mag = np.mean(
            np.abs(
                np.log(np.maximum(s_ref, config.log_floor))
                - np.log(np.maximum(s_est, config.log_floor))
            )
        )
        terms.append((m, float(sc), float(log_mag)))
    return terms


def multiscale_stft_loss(x, x_hat, config: LossConfig = LossConfig()) -> float:
    """Mean over resolutions of spectral convergence plus log-magnitude L1."""
    terms = stft_loss_breakdown(x, x_hat, config)
    return float(np.mean([sc + log_mag for _m, sc, log_mag in terms]))


def _score_maps(d_out) -> list:
    return list(getattr(d_out, "score_maps", d_out))


def _rms(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(np.sqrt(np.mean(v * v)))


def adv_loss(d_fake) -> float:
    """Generator-side LSGAN term: mean over scales of RMS(1 - D_k(fake))."""
    maps = _score_maps(d_fake)
    return float(np.mean([_rms(1.0 - np.asarray(m, dtype=np.float64))
                          for m in maps]))


def disc_loss(d_real, d_fake) -> float:
    """Discriminator LSGAN term: mean over scales of
    RMS(1 - D_k(real)) + RMS(D_k(fake))."""
    real = _score_maps(d_real)
    fake = _score_maps(d_fake)
    if len(real) != len(fake):
        raise LengthMismatchError(
            f"scale count mismatch: {len(real)} vs {len(fake)}"
        )
    per_scale = [
        _rms(1.0 - np.asarray(r, dtype=np.float64))
        + _rms(np.asarray(f, dtype=np.float64))
        for r, f in zip(real, fake)
    ]
    return float(np.mean(per_scale))


def generator_loss(l_stft: float, l_adv: float, alpha: float = 2.5) -> float:
    """Combined generator objective l_stft + alpha * l_adv."""
    if l_stft < 0 or l_adv < 0:
        raise InvalidInputError("loss terms must be non-negative")
    return float(l_stft) + float(alpha) * float(l_adv)
