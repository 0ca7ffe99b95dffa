"""Training objectives in torch, matching the engine's evaluation
conventions (Hann windows, 75% overlap, Frobenius spectral convergence,
mean log-magnitude L1, RMS adversarial terms)."""

import torch

FFT_SIZES = (2048, 1024, 512, 256, 128, 64)
LOG_FLOOR = 1e-7
ALPHA = 2.5


def _stft_mag(x, fft_size):
    window = torch.hann_window(fft_size, periodic=True, dtype=x.dtype,
                               device=x.device)
    spec = torch.stft(x, fft_size, hop_length=fft_size // 4,
                      win_length=fft_size, window=window, center=True,
                      pad_mode="constant", return_complex=True)
    return spec.abs()


def multiscale_stft_loss(x, x_hat, fft_sizes=FFT_SIZES):
    """Mean over scales of spectral convergence + log-magnitude L1."""
    total = x.new_zeros(())
    for m in fft_sizes:
        s = _stft_mag(x, m)
        s_hat = _stft_mag(x_hat, m)
        sc = torch.norm(s - s_hat) / torch.norm(s).clamp_min(1e-12)
        log_mag = (s.clamp_min(LOG_FLOOR).log()
                   - s_hat.clamp_min(LOG_FLOOR).log()).abs().mean()
        total = total + sc + log_mag
    return total / len(fft_sizes)


def _rms(v):
    return v.pow(2).mean().sqrt()


def adv_loss(fake_maps):
    terms = [_rms(1.0 - m) for m in fake_maps]
    return torch.stack(terms).mean()


def disc_loss(real_maps, fake_maps):
    terms = [_rms(1.0 - r) + _rms(f) for r, f in zip(real_maps, fake_maps)]
    return torch.stack(terms).mean()


def generator_loss(l_stft, l_adv, alpha=ALPHA):
    return l_stft + alpha * l_adv
