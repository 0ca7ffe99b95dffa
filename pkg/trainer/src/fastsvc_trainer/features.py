"""Feature front-end for training, numerically matched to the engine's
conversion pipeline (same formulas, same seeded noise), plus the mock
linguistic extractor that stands in for an external ASR encoder."""

import numpy as np

SAMPLE_RATE = 16000
LINGUISTIC_HOP = 320
F0_HOP = 80
LOUDNESS_HOP = 64
LOUDNESS_FFT = 1024
LOUDNESS_FLOOR_DB = -80.0

SINE_AMPLITUDE = 0.1
NOISE_STD = 0.003
UNVOICED_NOISE_GAIN = 100.0

MEL_BINS = 80


def upsample_linear(series, hop, target_len):
    series = np.asarray(series, dtype=np.float64)
    anchors = np.arange(len(series), dtype=np.float64) * hop
    return np.interp(np.arange(target_len, dtype=np.float64), anchors, series)


def generate_excitation(f0_audio, sample_rate=SAMPLE_RATE, noise_seed=0,
                        test_mode=False):
    f0 = np.asarray(f0_audio, dtype=np.float64)
    rng = np.random.default_rng(noise_seed)
    if test_mode:
        phi = 0.0
        noise = np.zeros(len(f0))
    else:
        phi = rng.uniform(-np.pi, np.pi)
        noise = rng.normal(0.0, NOISE_STD, size=len(f0))
    phase = np.cumsum(2.0 * np.pi * f0 / sample_rate)
    return np.where(
        f0 > 0,
        SINE_AMPLITUDE * np.sin(phase + phi) + noise,
        UNVOICED_NOISE_GAIN * noise,
    ).astype(np.float32)


def _hann(n):
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def a_weighting_db(freqs):
    f2 = np.asarray(freqs, dtype=np.float64) ** 2

    def response(f2):
        return (12194.0**2 * f2 * f2) / (
            (f2 + 20.6**2)
            * np.sqrt((f2 + 107.7**2) * (f2 + 737.9**2))
            * (f2 + 12194.0**2)
        )

    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(response(f2)) - 20.0 * np.log10(
            response(np.array(1000.0**2)))


def loudness_db(samples, hop=LOUDNESS_HOP, fft_size=LOUDNESS_FFT,
                sample_rate=SAMPLE_RATE):
    x = np.asarray(samples, dtype=np.float64)
    n_frames = int(np.ceil(len(x) / hop))
    half = fft_size // 2
    padded = np.pad(x, (half, half + hop))
    window = _hann(fft_size)
    scale = 2.0 / window.sum()
    idx = np.arange(fft_size)[None, :] + hop * np.arange(n_frames)[:, None]
    power = np.abs(np.fft.rfft(padded[idx] * window, axis=1)) ** 2 * scale**2
    freqs = np.fft.rfftfreq(fft_size, d=1.0 / sample_rate)
    gain = 10.0 ** (a_weighting_db(freqs) / 10.0)
    mean_power = np.mean(power * gain[None, :], axis=1)
    floor = 10.0 ** (LOUDNESS_FLOOR_DB / 10.0)
    return 10.0 * np.log10(np.maximum(mean_power, floor))


def loudness_conditioning(samples, target_len):
    """Audio -> normalized audio-rate loudness, as the engine computes it."""
    db = loudness_db(samples)
    norm = np.clip(db / 40.0 + 1.0, -1.0, 1.0)
    return upsample_linear(norm, LOUDNESS_HOP, target_len).astype(np.float32)


def excitation_conditioning(f0_frames, target_len, noise_seed=0):
    """Frame-rate F0 -> audio-rate sine excitation, engine-matched."""
    f0_audio = upsample_linear(f0_frames, F0_HOP, target_len)
    return generate_excitation(f0_audio, noise_seed=noise_seed)


def _mel_filterbank(n_mels, fft_size, sample_rate):
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2),
                             n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bins = np.fft.rfftfreq(fft_size, d=1.0 / sample_rate)
    fb = np.zeros((n_mels, len(bins)))
    for i in range(n_mels):
        left, center, right = hz_points[i:i + 3]
        rising = (bins - left) / max(center - left, 1e-9)
        falling = (right - bins) / max(right - center, 1e-9)
        fb[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return fb


def linguistic_projection(dim, seed=0):
    """Fixed seeded projection from log-mel to the feature dimension."""
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, 1.0 / np.sqrt(MEL_BINS),
                      (dim, MEL_BINS)).astype(np.float32)


def mock_linguistic(samples, dim, projection_seed=0, fft_size=1024):
    """80-bin log-mel at hop 320, projected to ``dim``; one row per frame."""
    x = np.asarray(samples, dtype=np.float64)
    n_frames = len(x) // LINGUISTIC_HOP
    half = fft_size // 2
    padded = np.pad(x, (half, half + LINGUISTIC_HOP))
    window = _hann(fft_size)
    idx = (np.arange(fft_size)[None, :]
           + LINGUISTIC_HOP * np.arange(n_frames)[:, None])
    power = np.abs(np.fft.rfft(padded[idx] * window, axis=1)) ** 2
    fb = _mel_filterbank(MEL_BINS, fft_size, SAMPLE_RATE)
    log_mel = np.log(power @ fb.T + 1e-5)
    proj = linguistic_projection(dim, projection_seed)
    return (log_mel @ proj.T.astype(np.float64)).astype(np.float32)
