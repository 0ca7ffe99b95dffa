"""Signal-processing front-end: F0 interpolation, sine excitation,
A-weighted loudness.

All functions are pure; randomness comes in through explicit seeds.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SINE_AMPLITUDE = 0.1
NOISE_STD = 0.003
UNVOICED_NOISE_GAIN = 100.0

LOUDNESS_HOP = 64
LOUDNESS_FFT = 1024
LOUDNESS_FLOOR_DB = -80.0

F0_DEFAULT_HOP = 80


@dataclass
class AudioBuffer:
    """Mono waveform with its sample rate. Amplitudes are nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.sample_rate <= 0:
            raise InvalidInputError("sample_rate must be positive")
        if self.samples.ndim != 1:
            raise InvalidInputError("audio must be mono (1-D)")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInputError("audio contains non-finite samples")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass
class F0Contour:
    """Frame-rate pitch in Hz; 0 encodes unvoiced frames.

    Values are kept in float64 (the `.f0` file stores float32).
    """

    values: np.ndarray
    hop: int = F0_DEFAULT_HOP

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.hop <= 0:
            raise InvalidInputError("f0 hop must be positive")
        if np.any(self.values < 0):
            raise InvalidInputError("f0 values must be >= 0")


@dataclass
class LoudnessContour:
    """Frame-rate loudness in dB, floor-clamped at LOUDNESS_FLOOR_DB."""

    values: np.ndarray
    hop: int = LOUDNESS_HOP

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.hop <= 0:
            raise InvalidInputError("loudness hop must be positive")


def upsample_linear(series, hop: int, target_len: int) -> np.ndarray:
    """Upsample a frame-rate series to audio rate by linear interpolation.

    Frame i anchors at sample i*hop; samples past the last anchor hold the
    last value.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1 or len(series) == 0:
        raise InvalidInputError("series must be a non-empty 1-D sequence")
    if hop <= 0:
        raise InvalidInputError("hop must be positive")
    if target_len < 0 or target_len > hop * len(series):
        raise InvalidInputError(
            f"target_len {target_len} outside [0, hop*frames] = "
            f"[0, {hop * len(series)}]"
        )
    anchors = np.arange(len(series), dtype=np.float64) * hop
    t = np.arange(target_len, dtype=np.float64)
    return np.interp(t, anchors, series)


def generate_excitation(
    f0_audio,
    sample_rate: float,
    phase: float | None = None,
    noise_seed: int = 0,
    test_mode: bool = False,
) -> np.ndarray:
    """Sine excitation from an audio-rate F0 sequence.

    Voiced samples (f > 0) are 0.1*sin(cumulative phase + phi) plus Gaussian
    noise with sigma 0.003; unvoiced samples are 100x that noise. The phase
    accumulator runs across the whole utterance. ``test_mode`` pins the noise
    to zero and phi to 0 so outputs are closed-form.
    """
    f0 = np.asarray(f0_audio, dtype=np.float64)
    if f0.ndim != 1:
        raise InvalidInputError("f0_audio must be 1-D")
    if sample_rate <= 0:
        raise InvalidInputError("sample_rate must be positive")
    if np.any(f0 < 0):
        raise InvalidInputError("f0 must be >= 0")
    if np.any(f0 >= sample_rate / 2):
        raise InvalidInputError("f0 at or above Nyquist")

    rng = np.random.default_rng(noise_seed)
    if test_mode:
        phi = 0.0
        noise = np.zeros(len(f0))
    else:
        if phase is None:
            phi = rng.uniform(-np.pi, np.pi)
        else:
            phi = float(phase)
        noise = rng.normal(0.0, NOISE_STD, size=len(f0))

    cum_phase = np.cumsum(2.0 * np.pi * f0 / sample_rate)
    voiced = f0 > 0
    e = np.where(
        voiced,
        SINE_AMPLITUDE * np.sin(cum_phase + phi) + noise,
        UNVOICED_NOISE_GAIN * noise,
    )
    return e.astype(np.float32)


def a_weighting_db(freqs) -> np.ndarray:
    """Standard analytic A-weighting curve in dB, exactly 0 dB at 1 kHz."""
    f = np.asarray(freqs, dtype=np.float64)
    f2 = f * f

    def response(f2):
        num = (12194.0**2) * f2 * f2
        den = (
            (f2 + 20.6**2)
            * np.sqrt((f2 + 107.7**2) * (f2 + 737.9**2))
            * (f2 + 12194.0**2)
        )
        return num / den

    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(response(f2)) - 20.0 * np.log10(
            response(np.array(1000.0**2))
        )
    return db


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def compute_loudness(
    audio: AudioBuffer, hop: int = LOUDNESS_HOP, fft_size: int = LOUDNESS_FFT
) -> LoudnessContour:
    """A-weighted loudness, one dB value per hop of samples.

    Per frame: Hann-windowed power spectrum (center-padded), per-bin
    A-weighting gain applied in the power domain, mean over bins, dB with a
    floor clamp at LOUDNESS_FLOOR_DB. Power is normalized so a full-scale
    sine peaks at ~0 dB in its bin.
    """
    if hop <= 0:
        raise InvalidInputError("hop must be positive")
    x = audio.samples.astype(np.float64)
    if len(x) < fft_size:
        raise InvalidInputError(
            f"audio length {len(x)} shorter than analysis window {fft_size}"
        )

    n_frames = int(np.ceil(len(x) / hop))
    half = fft_size // 2
    padded = np.pad(x, (half, half + hop))
    window = _hann_periodic(fft_size)
    # normalization: unit-amplitude sine -> ~1.0 peak bin power
    scale = 2.0 / window.sum()

    idx = np.arange(fft_size)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = padded[idx] * window
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2 * scale**2

    freqs = np.fft.rfftfreq(fft_size, d=1.0 / audio.sample_rate)
    gain = 10.0 ** (a_weighting_db(freqs) / 10.0)

    mean_power = np.mean(power * gain[None, :], axis=1)
    floor_power = 10.0 ** (LOUDNESS_FLOOR_DB / 10.0)
    db = 10.0 * np.log10(np.maximum(mean_power, floor_power))
    return LoudnessContour(values=db.astype(np.float32), hop=hop)


def normalize_loudness(contour: LoudnessContour) -> np.ndarray:
    """Affine map from [-80, 0] dB to [-1, 1], clipped, for conditioning."""
    v = contour.values.astype(np.float64) / 40.0 + 1.0
    return np.clip(v, -1.0, 1.0).astype(np.float32)


def shift_f0_semitones(contour: F0Contour, semitones: float) -> F0Contour:
    """Transpose voiced values by 2**(semitones/12); zeros stay unvoiced."""
    factor = 2.0 ** (float(semitones) / 12.0)
    values = contour.values * factor
    values[contour.values == 0] = 0.0
    return F0Contour(values=values, hop=contour.hop)
